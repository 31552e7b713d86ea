#pragma once

// Sampled checks of operator properties: order preservation and sup-norm
// Lipschitz ratios on random pairs.

#include "orderdp/order.hpp"

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

namespace orderdp {

using ValuePair = std::pair<ValueVector, ValueVector>;

template <class Rng>
ValueVector random_vector(Eigen::Index n, double lo, double hi, Rng& rng) {
    std::uniform_real_distribution<double> unif(lo, hi);
    ValueVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = unif(rng);
    return v;
}

/// Pair (v, w) with v <= w pointwise. Some coordinates are left equal so
/// that pairs on the boundary of the order are exercised too.
template <class Rng>
ValuePair random_comparable_pair(Eigen::Index n, double lo, double hi, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    ValueVector v = random_vector(n, lo, hi, rng);
    ValueVector w = v;
    for (Eigen::Index i = 0; i < n; ++i)
        if (unif(rng) < 0.75) w[i] += (hi - lo) * unif(rng);
    return {std::move(v), std::move(w)};
}

template <class Rng>
std::vector<ValuePair> random_comparable_pairs(int count, Eigen::Index n, double lo, double hi, Rng& rng) {
    std::vector<ValuePair> pairs;
    pairs.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) pairs.push_back(random_comparable_pair(n, lo, hi, rng));
    return pairs;
}

template <class Rng>
std::vector<ValuePair> random_pairs(int count, Eigen::Index n, double lo, double hi, Rng& rng) {
    std::vector<ValuePair> pairs;
    pairs.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) pairs.emplace_back(random_vector(n, lo, hi, rng), random_vector(n, lo, hi, rng));
    return pairs;
}

struct OrderPreservationReport {
    int tested = 0;
    int violations = 0;
    double worst_violation = 0.0;
    bool holds() const { return violations == 0; }
};

/// For every pair (v, w) with v <= w, checks S v <= S w + tol.
template <class Op>
OrderPreservationReport check_order_preserving(const Op& S, const std::vector<ValuePair>& pairs,
                                               double tol = 1e-12) {
    OrderPreservationReport report;
    for (const auto& [v, w] : pairs) {
        if (!leq(v, w)) continue;
        ++report.tested;
        const double excess = order_violation(S(v), S(w));
        if (excess > tol) {
            ++report.violations;
            report.worst_violation = std::max(report.worst_violation, excess);
        }
    }
    return report;
}

/// max over pairs of ||S v - S w|| / ||v - w|| (sup norm); pairs with v == w
/// are ignored.
template <class Op>
double max_lipschitz_ratio(const Op& S, const std::vector<ValuePair>& pairs) {
    double worst = 0.0;
    for (const auto& [v, w] : pairs) {
        const double d = sup_distance(v, w);
        if (d == 0.0) continue;
        worst = std::max(worst, sup_distance(S(v), S(w)) / d);
    }
    return worst;
}

} // namespace orderdp
