#pragma once

#include "orderdp/errors.hpp"
#include "orderdp/order.hpp"
#include "orderdp/properties.hpp"
#include "orderdp/policy.hpp"
#include "orderdp/adp.hpp"
#include "orderdp/mdp.hpp"
#include "orderdp/empirical.hpp"
#include "orderdp/approximate.hpp"
#include "orderdp/numerics.hpp"
#include "orderdp/risk.hpp"
#include "orderdp/structural.hpp"
#include "orderdp/certainty_equivalent.hpp"
#include "orderdp/distributional.hpp"
#include "orderdp/spectral.hpp"
#include "orderdp/firm.hpp"
#include "orderdp/version.hpp"
