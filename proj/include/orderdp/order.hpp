#pragma once

// Pointwise partial order on finite-dimensional value vectors, fixed point
// iteration, and order-stability checks.

#include "orderdp/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace orderdp {

/// Real-valued function on a finite index set (states, or state-action pairs).
using ValueVector = Eigen::VectorXd;

/// An operator on the value space.
using VectorOperator = std::function<ValueVector(const ValueVector&)>;

enum class OrderResult { Less, Equal, Greater, Incomparable };

inline std::string_view to_string(OrderResult r) {
    switch (r) {
    case OrderResult::Less: return "Less";
    case OrderResult::Equal: return "Equal";
    case OrderResult::Greater: return "Greater";
    case OrderResult::Incomparable: return "Incomparable";
    }
    return "?";
}

/// True for Less or Equal, i.e. the left operand precedes the right one.
inline bool precedes(OrderResult r) { return r == OrderResult::Less || r == OrderResult::Equal; }

inline void require_same_size(const ValueVector& v, const ValueVector& w) {
    if (v.size() != w.size())
        throw DimensionError("value vectors have different lengths: " + std::to_string(v.size()) + " vs " +
                             std::to_string(w.size()));
}

/// Pointwise comparison with slack `tol`.
/// Equal when |v - w| <= tol everywhere, Less when v <= w + tol everywhere
/// (but not Equal), Greater symmetrically, Incomparable otherwise.
inline OrderResult compare(const ValueVector& v, const ValueVector& w, double tol = 0.0) {
    require_same_size(v, w);
    bool le = true;
    bool ge = true;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v[i] > w[i] + tol) le = false;
        if (v[i] < w[i] - tol) ge = false;
    }
    if (le && ge) return OrderResult::Equal;
    if (le) return OrderResult::Less;
    if (ge) return OrderResult::Greater;
    return OrderResult::Incomparable;
}

/// v <= w + tol pointwise.
inline bool leq(const ValueVector& v, const ValueVector& w, double tol = 0.0) {
    return precedes(compare(v, w, tol));
}

/// Largest amount by which v exceeds w, max_i (v_i - w_i), floored at zero.
/// Zero iff v <= w pointwise.
inline double order_violation(const ValueVector& v, const ValueVector& w) {
    require_same_size(v, w);
    if (v.size() == 0) return 0.0;
    return std::max(0.0, (v - w).maxCoeff());
}

inline double sup_distance(const ValueVector& v, const ValueVector& w) {
    require_same_size(v, w);
    if (v.size() == 0) return 0.0;
    return (v - w).cwiseAbs().maxCoeff();
}

inline bool all_finite(const ValueVector& v) { return v.allFinite(); }

struct FixedPointResult {
    ValueVector value;
    int iterations = 0;
    double residual = 0.0;
    /// compare(v_k, v_{k+1}) for each step taken.
    std::vector<OrderResult> trace;
};

/// Iterates v <- S v from v0 and returns the first iterate v_n with
/// ||S v_n - v_n|| <= tol, together with n.
inline FixedPointResult iterate_to_fixed_point(const VectorOperator& S, ValueVector v0, double tol,
                                               int max_iter, double order_tol = 0.0) {
    FixedPointResult out;
    out.value = std::move(v0);
    for (int n = 0;; ++n) {
        ValueVector next = S(out.value);
        require_same_size(out.value, next);
        out.residual = sup_distance(next, out.value);
        if (!std::isfinite(out.residual))
            throw NonConvergenceError("fixed point iteration diverged", out.value, out.residual, n);
        if (out.residual <= tol) {
            out.iterations = n;
            return out;
        }
        if (n >= max_iter)
            throw NonConvergenceError("fixed point iteration did not converge", out.value, out.residual, n);
        out.trace.push_back(compare(out.value, next, order_tol));
        out.value = std::move(next);
    }
}

enum class StabilityDirection { Upward, Downward };

struct StabilityCounterexample {
    ValueVector input;
    StabilityDirection direction;
};

struct StabilityReport {
    std::string operator_name;
    bool upward_holds = true;
    bool downward_holds = true;
    int upward_tested = 0;
    int downward_tested = 0;
    /// Probes satisfying neither premise.
    int skipped = 0;
    std::vector<StabilityCounterexample> counterexamples;
};

/// For each probe v: if v <= S v, requires v <= fixed_point (upward); if
/// S v <= v, requires fixed_point <= v (downward).
inline StabilityReport check_order_stability(const VectorOperator& S, const ValueVector& fixed_point,
                                              const std::vector<ValueVector>& probes, double tol = 1e-10,
                                              std::string name = {}) {
    StabilityReport report;
    report.operator_name = std::move(name);
    for (const auto& v : probes) {
        const ValueVector sv = S(v);
        const bool up = leq(v, sv, tol);
        const bool down = leq(sv, v, tol);
        if (!up && !down) {
            ++report.skipped;
            continue;
        }
        if (up) {
            ++report.upward_tested;
            if (!leq(v, fixed_point, tol)) {
                report.upward_holds = false;
                report.counterexamples.push_back({v, StabilityDirection::Upward});
            }
        }
        if (down) {
            ++report.downward_tested;
            if (!leq(fixed_point, v, tol)) {
                report.downward_holds = false;
                report.counterexamples.push_back({v, StabilityDirection::Downward});
            }
        }
    }
    return report;
}

/// Probes around a fixed point: half shifted down, half shifted up, by
/// random nonnegative vectors with entries in [0, scale]. A random shift
/// rarely satisfies v <= S v by itself, so a common positive offset is added
/// to push most probes into the premise of the stability test.
template <class Rng>
std::vector<ValueVector> make_stability_probes(const ValueVector& fixed_point, int count, double scale, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<ValueVector> probes;
    probes.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        ValueVector shift(fixed_point.size());
        const double offset = scale * unif(rng);
        for (Eigen::Index i = 0; i < shift.size(); ++i) shift[i] = offset + 0.25 * scale * unif(rng);
        probes.push_back(k % 2 == 0 ? ValueVector(fixed_point - shift) : ValueVector(fixed_point + shift));
    }
    return probes;
}

} // namespace orderdp
