#pragma once

// Firm valuation with an exit option on a discretized productivity grid.
// Productivity follows x' = A x with A lognormal; each period the firm earns
// the optimized profit pi(x) and may exit next period for the outside value q.
// Policies are 0/1 per grid point, 1 meaning exit.

#include "orderdp/adp.hpp"
#include "orderdp/errors.hpp"
#include "orderdp/order.hpp"
#include "orderdp/policy.hpp"
#include "orderdp/spectral.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace orderdp {

/// max_{l >= 0} p x l^theta - c - l, solved by l* = (theta p x)^{1/(1-theta)}.
inline double profit(double p, double theta, double c, double x) {
    if (x <= 0.0) return -c;
    const double l = std::pow(theta * p * x, 1.0 / (1.0 - theta));
    return p * x * std::pow(l, theta) - c - l;
}

struct FirmGridSpec {
    int size = 200;
    double x_min = 0.01;
    double x_max = 5.0;
};

inline std::vector<double> geometric_grid(const FirmGridSpec& g) {
    if (g.size < 1) throw ModelError("grid size must be positive");
    if (!(g.x_min > 0.0) || !(g.x_max >= g.x_min)) throw ModelError("geometric grid needs 0 < x_min <= x_max");
    if (g.size == 1) return {g.x_min};
    std::vector<double> x(static_cast<std::size_t>(g.size));
    const double lr = std::log(g.x_max / g.x_min) / (g.size - 1);
    for (int i = 0; i < g.size; ++i) x[i] = g.x_min * std::exp(lr * i);
    x.back() = g.x_max;
    return x;
}

struct FirmConfig {
    double p = 1.0;
    double theta = 0.3;
    double c = 4.0;
    std::vector<double> beta{0.95};  // one entry (constant) or one per grid point
    std::vector<double> q{0.0};      // likewise
    double mu_A = -0.012;
    double sigma_A = 0.1;
    FirmGridSpec grid_spec;
    std::vector<double> grid;  // explicit grid; overrides grid_spec when nonempty
};

/// Grid of a few points for enumeration-based checks.
inline FirmConfig firm_mini_grid_config(int size = 6) {
    FirmConfig cfg;
    cfg.grid_spec.size = size;
    return cfg;
}

inline double lognormal_cdf(double z, double mu, double sigma) {
    if (z <= 0.0) return 0.0;
    if (sigma == 0.0) return std::log(z) >= mu ? 1.0 : 0.0;
    return 0.5 * std::erfc(-(std::log(z) - mu) / (sigma * std::sqrt(2.0)));
}

class FirmModel {
public:
    explicit FirmModel(const FirmConfig& cfg) : cfg_(cfg) {
        x_ = cfg.grid.empty() ? geometric_grid(cfg.grid_spec) : cfg.grid;
        const auto n = static_cast<Eigen::Index>(x_.size());
        if (n == 0) throw ModelError("empty grid");
        for (std::size_t i = 0; i < x_.size(); ++i) {
            if (!std::isfinite(x_[i]) || x_[i] < 0.0) throw ModelError("grid points must be finite and >= 0");
            if (i > 0 && !(x_[i] > x_[i - 1])) throw ModelError("grid must be strictly increasing");
        }
        if (!(cfg.p > 0.0) || !std::isfinite(cfg.p)) throw ModelError("p must be positive");
        if (!(cfg.theta > 0.0 && cfg.theta < 1.0)) throw ModelError("theta must lie in (0, 1)");
        if (!(cfg.c >= 0.0) || !std::isfinite(cfg.c)) throw ModelError("c must be nonnegative");
        if (!std::isfinite(cfg.mu_A) || !(cfg.sigma_A >= 0.0) || !std::isfinite(cfg.sigma_A))
            throw ModelError("lognormal parameters must be finite with sigma_A >= 0");
        beta_ = broadcast(cfg.beta, n, "beta");
        q_ = broadcast(cfg.q, n, "q");
        for (Eigen::Index i = 0; i < n; ++i)
            if (!(beta_[i] >= 0.0) || !std::isfinite(beta_[i])) throw ModelError("beta must be finite and >= 0");

        pi_.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) pi_[i] = profit(cfg.p, cfg.theta, cfg.c, x_[i]);
        build_kernel();
        K_ = beta_.asDiagonal() * P_;
    }

    const FirmConfig& config() const { return cfg_; }
    const std::vector<double>& grid() const { return x_; }
    const Eigen::MatrixXd& P() const { return P_; }
    const Eigen::MatrixXd& K() const { return K_; }
    const ValueVector& pi() const { return pi_; }
    const ValueVector& q() const { return q_; }
    const ValueVector& beta() const { return beta_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    Eigen::Index size() const { return static_cast<Eigen::Index>(x_.size()); }

    const SpectralEstimate& spectral() const {
        if (!rho_) rho_ = spectral_radius(K_);
        return *rho_;
    }

    /// Throws WellPosednessError unless rho(K) < 1.
    void require_well_posed() const {
        const auto& s = spectral();
        if (!s.converged && s.upper >= 1.0)
            throw WellPosednessError("rho(K) could not be bracketed below 1 (upper bound " + std::to_string(s.upper) + ")");
        if (s.rho >= 1.0 - 1e-10)
            throw WellPosednessError("rho(K) = " + std::to_string(s.rho) + " >= 1: the discount operator must have spectral radius below 1");
    }

    /// T_sigma v = pi + K (sigma q + (1 - sigma) v)
    ValueVector apply(const Policy& sigma, const ValueVector& v) const {
        check(sigma);
        if (v.size() != size()) throw DimensionError("value vector does not match the grid");
        return pi_ + K_ * mix(sigma, v);
    }

    /// Exit wherever q >= v.
    Policy greedy(const ValueVector& v) const {
        if (v.size() != size()) throw DimensionError("value vector does not match the grid");
        Policy s;
        s.action.resize(x_.size());
        for (Eigen::Index i = 0; i < size(); ++i) s.action[i] = q_[i] >= v[i] ? 1 : 0;
        return s;
    }

    /// v_sigma = (I - K (1 - sigma))^{-1} (pi + K sigma q)
    ValueVector evaluate(const Policy& sigma) const {
        check(sigma);
        ValueVector stay(size());
        ValueVector exit_q(size());
        for (Eigen::Index i = 0; i < size(); ++i) {
            stay[i] = sigma[i] ? 0.0 : 1.0;
            exit_q[i] = sigma[i] ? q_[i] : 0.0;
        }
        const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(size(), size()) - K_ * stay.asDiagonal();
        return solve(A, pi_ + K_ * exit_q);
    }

    /// All 2^n exit policies; refused beyond 20 grid points.
    std::vector<Policy> policies() const {
        if (size() > 20) throw ModelError("policy enumeration is limited to grids of at most 20 points");
        return enumerate_policies(std::vector<std::vector<int>>(x_.size(), {0, 1}));
    }

    /// Constant bounds that every T_sigma maps into themselves.
    ValueVector upper_start() const {
        return ValueVector::Constant(size(), (pi_.maxCoeff() > 0 ? pi_.maxCoeff() : 0.0) + q_.cwiseMax(0.0).maxCoeff()) /
               (1.0 - beta_.maxCoeff());
    }
    ValueVector lower_start() const {
        return ValueVector::Constant(size(), (pi_.minCoeff() < 0 ? pi_.minCoeff() : 0.0) + q_.cwiseMin(0.0).minCoeff()) /
               (1.0 - beta_.maxCoeff());
    }

    /// (I - K)^{-1} (pi + K q), after the rho(K) < 1 check.
    ValueVector upper_bound() const {
        require_well_posed();
        return solve(Eigen::MatrixXd::Identity(size(), size()) - K_, pi_ + K_ * q_);
    }

    /// K max(q, v): expected discounted value of next period's option.
    ValueVector continuation_value(const ValueVector& v) const { return K_ * q_.cwiseMax(v); }

private:
    static ValueVector broadcast(const std::vector<double>& v, Eigen::Index n, const std::string& name) {
        if (v.size() == 1) return ValueVector::Constant(n, v[0]);
        if (static_cast<Eigen::Index>(v.size()) != n)
            throw ModelError(name + " must have one entry or one per grid point");
        ValueVector out(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!std::isfinite(v[i])) throw ModelError(name + " must be finite");
            out[i] = v[i];
        }
        return out;
    }

    static ValueVector solve(const Eigen::MatrixXd& A, const ValueVector& b) {
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
        if (!(lu.rcond() > 0.0)) throw WellPosednessError("linear system is singular");
        ValueVector v = lu.solve(b);
        if (!v.allFinite()) throw WellPosednessError("linear solve produced non-finite values");
        return v;
    }

    void check(const Policy& sigma) const {
        if (static_cast<Eigen::Index>(sigma.size()) != size()) throw DimensionError("policy does not match the grid");
        for (std::size_t i = 0; i < sigma.size(); ++i)
            if (sigma[i] != 0 && sigma[i] != 1) throw PolicyError("exit policy entries must be 0 or 1");
    }

    ValueVector mix(const Policy& sigma, const ValueVector& v) const {
        ValueVector w(size());
        for (Eigen::Index i = 0; i < size(); ++i) w[i] = sigma[i] ? q_[i] : v[i];
        return w;
    }

    // Cell j is [b_{j-1}, b_j) with b_j the midpoint of x_j and x_{j+1};
    // the first cell starts at 0 and the last one is unbounded.
    void build_kernel() {
        const auto n = size();
        P_ = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (x_[i] == 0.0) {
                P_(i, 0) = 1.0;
                continue;
            }
            double prev = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                const double cum =
                    j + 1 == n ? 1.0 : lognormal_cdf(0.5 * (x_[j] + x_[j + 1]) / x_[i], cfg_.mu_A, cfg_.sigma_A);
                P_(i, j) = std::max(0.0, cum - prev);
                prev = cum;
            }
            P_.row(i) /= P_.row(i).sum();
            if (i > 0 && i + 1 < n && n > 2 && (P_(i, 0) > 0.5 || P_(i, n - 1) > 0.5))
                warnings_.push_back("grid too coarse: row " + std::to_string(i) +
                                    " puts more than half its mass in an end cell");
        }
    }

    FirmConfig cfg_;
    std::vector<double> x_;
    ValueVector beta_;
    ValueVector q_;
    ValueVector pi_;
    Eigen::MatrixXd P_;
    Eigen::MatrixXd K_;
    std::vector<std::string> warnings_;
    mutable std::optional<SpectralEstimate> rho_;
};

struct FirmRow {
    double x = 0.0;
    double value = 0.0;
    double continuation_value = 0.0;
    bool exit = false;
};

struct FirmSolution {
    SolveResult result;
    SpectralEstimate rho;
    ValueVector v_bar;
    std::optional<double> threshold_x;  // largest grid point with exit = 1
    int threshold_index = -1;
    std::vector<FirmRow> rows;
};

enum class Algorithm { Vfi, Hpi, Opi };

inline Algorithm parse_algorithm(const std::string& s) {
    if (s == "vfi") return Algorithm::Vfi;
    if (s == "hpi") return Algorithm::Hpi;
    if (s == "opi") return Algorithm::Opi;
    throw ModelError("unknown algorithm '" + s + "' (expected vfi, hpi or opi)");
}

inline std::string to_string(Algorithm a) {
    switch (a) {
    case Algorithm::Vfi: return "vfi";
    case Algorithm::Hpi: return "hpi";
    case Algorithm::Opi: return "opi";
    }
    return "?";
}

template <AdpModel M>
SolveResult run_algorithm(const M& model, Algorithm alg, const ValueVector& v0, int opi_m, const SolverOptions& opt) {
    switch (alg) {
    case Algorithm::Vfi: return vfi(model, v0, opt);
    case Algorithm::Hpi: return hpi(model, v0, opt);
    case Algorithm::Opi: return opi(model, v0, opi_m, opt);
    }
    throw ModelError("unknown algorithm");
}

/// Solves from v_bar after the rho(K) < 1 gate.
inline FirmSolution solve_firm(const FirmModel& m, Algorithm alg, int opi_m = 20, SolverOptions opt = {}) {
    FirmSolution sol;
    sol.v_bar = m.upper_bound();
    sol.rho = m.spectral();
    sol.result = run_algorithm(m, alg, sol.v_bar, opi_m, opt);
    const ValueVector cont = m.continuation_value(sol.result.value);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const bool ex = sol.result.policy[i] == 1;
        sol.rows.push_back({m.grid()[i], sol.result.value[i], cont[i], ex});
        if (ex) {
            sol.threshold_index = static_cast<int>(i);
            sol.threshold_x = m.grid()[i];
        }
    }
    return sol;
}

} // namespace orderdp
