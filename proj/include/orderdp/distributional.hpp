#pragma once

// Distributional policy evaluation: finitely supported return distributions
// per state, first-order stochastic dominance, the pushforward operator D_sigma
// and a projected fixed-point iteration.

#include "orderdp/errors.hpp"
#include "orderdp/mdp.hpp"
#include "orderdp/order.hpp"
#include "orderdp/policy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace orderdp {

class ReturnDistribution {
public:
    ReturnDistribution() : support_{0.0}, weights_{1.0} {}

    /// Sorts, merges atoms at equal locations, drops zero weights and
    /// normalizes. Throws ModelError on negative, non-finite or zero total mass.
    static ReturnDistribution from_atoms(std::vector<std::pair<double, double>> atoms) {
        double total = 0.0;
        for (const auto& [s, w] : atoms) {
            if (!std::isfinite(s) || !std::isfinite(w) || w < 0.0) throw ModelError("invalid distribution atom");
            total += w;
        }
        if (!(total > 0.0)) throw ModelError("distribution has no mass");
        std::sort(atoms.begin(), atoms.end());
        ReturnDistribution d;
        d.support_.clear();
        d.weights_.clear();
        for (const auto& [s, w] : atoms) {
            if (w == 0.0) continue;
            if (!d.support_.empty() && d.support_.back() == s)
                d.weights_.back() += w;
            else {
                d.support_.push_back(s);
                d.weights_.push_back(w);
            }
        }
        for (double& w : d.weights_) w /= total;
        return d;
    }

    static ReturnDistribution from_arrays(const std::vector<double>& support, const std::vector<double>& weights) {
        if (support.size() != weights.size() || support.empty())
            throw ModelError("support and weights must be nonempty and of equal length");
        std::vector<std::pair<double, double>> atoms;
        for (std::size_t i = 0; i < support.size(); ++i) atoms.emplace_back(support[i], weights[i]);
        return from_atoms(std::move(atoms));
    }

    static ReturnDistribution point_mass(double at) { return from_atoms({{at, 1.0}}); }

    const std::vector<double>& support() const { return support_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return support_.size(); }

    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < size(); ++i) m += support_[i] * weights_[i];
        return m;
    }

    /// P(G <= t)
    double cdf(double t) const {
        double c = 0.0;
        for (std::size_t i = 0; i < size() && support_[i] <= t; ++i) c += weights_[i];
        return c;
    }

    double total_mass() const {
        double s = 0.0;
        for (double w : weights_) s += w;
        return s;
    }

private:
    std::vector<double> support_;
    std::vector<double> weights_;
};

using DistributionalValue = std::vector<ReturnDistribution>;

inline ValueVector means(const DistributionalValue& eta) {
    ValueVector m(static_cast<Eigen::Index>(eta.size()));
    for (std::size_t x = 0; x < eta.size(); ++x) m[static_cast<Eigen::Index>(x)] = eta[x].mean();
    return m;
}

inline DistributionalValue point_masses(const ValueVector& at) {
    DistributionalValue eta;
    for (Eigen::Index x = 0; x < at.size(); ++x) eta.push_back(ReturnDistribution::point_mass(at[x]));
    return eta;
}

/// Largest amount by which CDF_hat exceeds CDF over the merged support; zero
/// when d is dominated by d_hat.
inline double dominance_excess(const ReturnDistribution& d, const ReturnDistribution& d_hat) {
    std::vector<double> pts = d.support();
    pts.insert(pts.end(), d_hat.support().begin(), d_hat.support().end());
    std::sort(pts.begin(), pts.end());
    double worst = 0.0;
    double c = 0.0;
    double c_hat = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    for (double t : pts) {
        while (i < d.size() && d.support()[i] <= t) c += d.weights()[i++];
        while (j < d_hat.size() && d_hat.support()[j] <= t) c_hat += d_hat.weights()[j++];
        worst = std::max(worst, c_hat - c);
    }
    return worst;
}

/// First-order stochastic dominance, state by state. eta precedes eta_hat when
/// CDF_eta >= CDF_eta_hat - tol everywhere.
inline OrderResult dominance_compare(const DistributionalValue& eta, const DistributionalValue& eta_hat,
                                     double tol = 1e-9) {
    if (eta.size() != eta_hat.size()) throw DimensionError("distributional values have different state counts");
    bool le = true;
    bool ge = true;
    for (std::size_t x = 0; x < eta.size(); ++x) {
        if (dominance_excess(eta[x], eta_hat[x]) > tol) le = false;
        if (dominance_excess(eta_hat[x], eta[x]) > tol) ge = false;
    }
    if (le && ge) return OrderResult::Equal;
    if (le) return OrderResult::Less;
    if (ge) return OrderResult::Greater;
    return OrderResult::Incomparable;
}

/// Random law with n_atoms atoms drawn uniformly in [lo, hi] and random weights.
template <class Rng>
ReturnDistribution random_distribution(int n_atoms, double lo, double hi, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::pair<double, double>> atoms;
    for (int k = 0; k < n_atoms; ++k) atoms.emplace_back(lo + (hi - lo) * unif(rng), 0.05 + unif(rng));
    return ReturnDistribution::from_atoms(std::move(atoms));
}

/// Pair (eta, eta_hat) with eta preceding eta_hat: eta_hat moves some atoms
/// of eta upward, which can only lower the CDF.
template <class Rng>
std::pair<DistributionalValue, DistributionalValue> random_dominated_pair(int n_states, int n_atoms, double lo,
                                                                          double hi, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    DistributionalValue eta, eta_hat;
    for (int x = 0; x < n_states; ++x) {
        const ReturnDistribution d = random_distribution(n_atoms, lo, hi, rng);
        std::vector<std::pair<double, double>> moved;
        for (std::size_t k = 0; k < d.size(); ++k)
            moved.emplace_back(d.support()[k] + (unif(rng) < 0.75 ? (hi - lo) * unif(rng) : 0.0), d.weights()[k]);
        eta.push_back(d);
        eta_hat.push_back(ReturnDistribution::from_atoms(std::move(moved)));
    }
    return {std::move(eta), std::move(eta_hat)};
}

/// (D_sigma eta)(x): law of r_sigma(x) + beta G', G' ~ eta(X'), X' ~ P_sigma(x, .).
inline DistributionalValue dist_policy_operator(const MdpTables& m, const Policy& sigma, const DistributionalValue& eta) {
    check_policy(m, sigma);
    if (eta.size() != static_cast<std::size_t>(m.n_states))
        throw DimensionError("distributional value does not match n_states");
    DistributionalValue out;
    out.reserve(eta.size());
    for (int x = 0; x < m.n_states; ++x) {
        const int a = sigma[x];
        const double r = m.r(x, a);
        std::vector<std::pair<double, double>> atoms;
        for (int y = 0; y < m.n_states; ++y) {
            const double p = m.p(x, a, y);
            if (p <= 0.0) continue;
            for (std::size_t k = 0; k < eta[y].size(); ++k)
                atoms.emplace_back(r + m.beta * eta[y].support()[k], p * eta[y].weights()[k]);
        }
        out.push_back(ReturnDistribution::from_atoms(std::move(atoms)));
    }
    return out;
}

enum class ProjectionKind { Quantile, Categorical };

/// Reduces the support to at most `cap` atoms.
/// Quantile: equal masses 1/cap at the quantiles of the evenly spaced levels
/// (2i+1)/(2 cap). Categorical: each atom's mass is split linearly between
/// the two neighbouring points of an evenly spaced grid of `cap` points on
/// [min support, max support], which keeps the mean.
inline ReturnDistribution project(const ReturnDistribution& d, std::size_t cap, ProjectionKind kind) {
    if (cap < 2) throw ModelError("support cap must be at least 2");
    if (d.size() <= cap) return d;
    const double lo = d.support().front();
    const double hi = d.support().back();
    const double step = (hi - lo) / static_cast<double>(cap - 1);
    auto grid = [&](std::size_t i) { return i + 1 == cap ? hi : lo + step * static_cast<double>(i); };
    std::vector<std::pair<double, double>> atoms;
    if (kind == ProjectionKind::Categorical) {
        std::vector<double> w(cap, 0.0);
        for (std::size_t k = 0; k < d.size(); ++k) {
            const double pos = (d.support()[k] - lo) / step;
            auto i = static_cast<std::size_t>(std::floor(pos));
            if (i >= cap - 1) {
                w[cap - 1] += d.weights()[k];
                continue;
            }
            const double frac = pos - static_cast<double>(i);
            w[i] += d.weights()[k] * (1.0 - frac);
            w[i + 1] += d.weights()[k] * frac;
        }
        for (std::size_t i = 0; i < cap; ++i) atoms.emplace_back(grid(i), w[i]);
    } else {
        std::size_t k = 0;
        double cum = d.weights()[0];
        for (std::size_t i = 0; i < cap; ++i) {
            const double level = (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(cap));
            while (cum < level && k + 1 < d.size()) cum += d.weights()[++k];
            atoms.emplace_back(d.support()[k], 1.0 / static_cast<double>(cap));
        }
    }
    return ReturnDistribution::from_atoms(std::move(atoms));
}

enum class DistStart { Zero, PolicyValue };

struct DistFixedPointOptions {
    int n_iter = 60;
    std::size_t support_cap = 2048;
    ProjectionKind projection = ProjectionKind::Quantile;
    DistStart start = DistStart::Zero;
};

struct DistFixedPointResult {
    DistributionalValue eta;
    ValueVector policy_value;
    double max_mean_error = 0.0;
    double error_bound = 0.0;       // 2 beta^n ||r|| / (1 - beta) + projection slack
    double projection_slack = 0.0;  // sum over steps k of beta^(n-k) times the mean shift at step k
    int projections = 0;
    bool within_bound = true;
};

/// Iterates D_sigma n_iter times, projecting any distribution whose support
/// exceeds the cap, and compares the resulting means with v_sigma.
inline DistFixedPointResult dist_policy_fixed_point(const MdpTables& m, const Policy& sigma,
                                                    const DistFixedPointOptions& opt = {}) {
    m.validate();
    if (opt.n_iter < 0) throw ModelError("n_iter must be nonnegative");
    DistFixedPointResult res;
    res.policy_value = mdp_policy_value(m, sigma);
    DistributionalValue eta = opt.start == DistStart::Zero ? point_masses(ValueVector::Zero(m.n_states))
                                                           : point_masses(res.policy_value);
    double r_norm = 0.0;
    for (int x = 0; x < m.n_states; ++x) r_norm = std::max(r_norm, std::abs(m.r(x, sigma[x])));
    double slack = 0.0;
    for (int n = 0; n < opt.n_iter; ++n) {
        eta = dist_policy_operator(m, sigma, eta);
        double shift = 0.0;
        for (auto& d : eta) {
            if (d.size() <= opt.support_cap) continue;
            const double before = d.mean();
            d = project(d, opt.support_cap, opt.projection);
            shift = std::max(shift, std::abs(d.mean() - before));
            ++res.projections;
        }
        slack = m.beta * slack + shift;
    }
    res.eta = std::move(eta);
    res.projection_slack = slack;
    const double start_gap = opt.start == DistStart::Zero ? 2.0 * r_norm / (1.0 - m.beta) : 0.0;
    res.error_bound = std::pow(m.beta, opt.n_iter) * start_gap + res.projection_slack + 1e-12 * (1.0 + r_norm / (1.0 - m.beta));
    res.max_mean_error = sup_distance(means(res.eta), res.policy_value);
    res.within_bound = res.max_mean_error <= res.error_bound;
    return res;
}

} // namespace orderdp
