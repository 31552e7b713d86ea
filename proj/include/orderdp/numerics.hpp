#pragma once

#include "orderdp/errors.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

namespace orderdp {

/// (1/theta) ln sum_i p_i exp(theta f_i), over entries with p_i > 0.
/// Shifted by the largest exponent so the sum never overflows.
inline double risk_sensitive_mean(double theta, const double* f, const double* p, std::size_t n) {
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        if (p[i] > 0.0) shift = std::max(shift, theta * f[i]);
    if (!std::isfinite(shift)) throw NumericRangeError("log-sum-exp of an empty or non-finite support");
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (p[i] > 0.0) s += p[i] * std::exp(theta * f[i] - shift);
    const double out = (shift + std::log(s)) / theta;
    if (!std::isfinite(out)) throw NumericRangeError("log-sum-exp overflow");
    return out;
}

} // namespace orderdp
