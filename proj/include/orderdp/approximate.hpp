#pragma once

// Approximate dynamic programming: every policy operator T_sigma of a base
// model is replaced by A o T_sigma for an order preserving approximation
// operator A on the value space.

#include "orderdp/adp.hpp"
#include "orderdp/order.hpp"
#include "orderdp/properties.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace orderdp {

struct Approximation {
    std::string name;
    VectorOperator op;
};

inline Approximation identity_approximation() {
    return {"identity", [](const ValueVector& v) { return v; }};
}

/// Piecewise-constant coarsening: coordinate i takes the minimum of v over
/// its cell, cell_of[i]. A single cell maps v to the constant min_i v_i.
inline Approximation coarsen_min_approximation(std::vector<int> cell_of) {
    if (cell_of.empty()) throw ModelError("coarsening needs a cell assignment");
    const int n_cells = *std::max_element(cell_of.begin(), cell_of.end()) + 1;
    if (*std::min_element(cell_of.begin(), cell_of.end()) < 0) throw ModelError("negative cell index");
    return {"coarsen_min", [cell_of = std::move(cell_of), n_cells](const ValueVector& v) {
                if (static_cast<std::size_t>(v.size()) != cell_of.size())
                    throw DimensionError("coarsening cell map does not match value length");
                std::vector<double> low(static_cast<std::size_t>(n_cells), std::numeric_limits<double>::infinity());
                for (std::size_t i = 0; i < cell_of.size(); ++i)
                    low[cell_of[i]] = std::min(low[cell_of[i]], v[static_cast<Eigen::Index>(i)]);
                ValueVector out(v.size());
                for (std::size_t i = 0; i < cell_of.size(); ++i) out[static_cast<Eigen::Index>(i)] = low[cell_of[i]];
                return out;
            }};
}

/// Keeps the coordinates in `kept` (sorted, containing 0) and gives every
/// other coordinate the value at the nearest kept index below it.
inline Approximation subsample_approximation(std::vector<int> kept) {
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    if (kept.empty() || kept.front() != 0) throw ModelError("subsampling must keep coordinate 0");
    return {"subsample", [kept = std::move(kept)](const ValueVector& v) {
                if (kept.back() >= v.size()) throw DimensionError("subsampling index out of range");
                ValueVector out(v.size());
                std::size_t k = 0;
                for (Eigen::Index i = 0; i < v.size(); ++i) {
                    while (k + 1 < kept.size() && kept[k + 1] <= i) ++k;
                    out[i] = v[kept[k]];
                }
                return out;
            }};
}

inline Approximation clamp_approximation(double lo, double hi) {
    if (!(lo <= hi)) throw ModelError("clamp interval is empty");
    return {"clamp", [lo, hi](const ValueVector& v) { return ValueVector(v.cwiseMax(lo).cwiseMin(hi)); }};
}

template <AdpModel Base>
class ApproximateModel {
public:
    /// Rejects A if it fails order preservation on sampled comparable pairs.
    ApproximateModel(Base base, Approximation approx, double eval_tol = 1e-12, int eval_max_iter = 1000000)
        : base_(std::move(base)), approx_(std::move(approx)), eval_tol_(eval_tol), eval_max_iter_(eval_max_iter) {
        std::mt19937_64 rng(0x5eedULL);
        const double scale = probe_scale();
        const auto pairs = random_comparable_pairs(256, base_.size(), -scale, scale, rng);
        const auto rep = check_order_preserving(approx_.op, pairs, 0.0);
        if (!rep.holds())
            throw ModelError("approximation operator '" + approx_.name + "' is not order preserving (" +
                             std::to_string(rep.violations) + " violations on sampled pairs)");
    }

    const Base& base() const { return base_; }
    const Approximation& approximation() const { return approx_; }
    Eigen::Index size() const { return base_.size(); }

    ValueVector apply(const Policy& sigma, const ValueVector& v) const { return approx_.op(base_.apply(sigma, v)); }

    /// A is order preserving, so a greedy policy of the base is greedy for
    /// the composed family as well.
    Policy greedy(const ValueVector& v) const { return base_.greedy(v); }

    ValueVector evaluate(const Policy& sigma) const {
        auto op = [&](const ValueVector& v) { return apply(sigma, v); };
        return iterate_to_fixed_point(op, ValueVector::Zero(size()), eval_tol_, eval_max_iter_).value;
    }

    std::vector<Policy> policies() const
        requires FiniteAdpModel<Base>
    {
        return base_.policies();
    }

    ValueVector lower_start() const
        requires HasLowerStart<Base>
    {
        return base_.lower_start();
    }
    ValueVector upper_start() const
        requires HasUpperStart<Base>
    {
        return base_.upper_start();
    }

private:
    double probe_scale() const {
        if constexpr (HasUpperStart<Base> && HasLowerStart<Base>) {
            const double s = std::max(base_.upper_start().cwiseAbs().maxCoeff(), base_.lower_start().cwiseAbs().maxCoeff());
            if (std::isfinite(s) && s > 0.0) return s;
        }
        return 10.0;
    }

    Base base_;
    Approximation approx_;
    double eval_tol_;
    int eval_max_iter_;
};

} // namespace orderdp
