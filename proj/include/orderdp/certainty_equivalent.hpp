#pragma once

// Certainty equivalent operators E: R^X -> R^G that generalize conditional
// expectation (order preserving, E lambda = lambda for constants), and the
// discrete choice model whose policy operators are T_sigma g = E H_sigma g.

#include "orderdp/adp.hpp"
#include "orderdp/numerics.hpp"
#include "orderdp/order.hpp"
#include "orderdp/structural.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace orderdp {

class CertaintyEquivalent {
public:
    virtual ~CertaintyEquivalent() = default;
    virtual std::string name() const = 0;
    virtual int n_states() const = 0;
    virtual int n_pairs() const = 0;
    /// f on states -> (E f) on state-action pairs.
    virtual ValueVector apply(const ValueVector& f) const = 0;
};

namespace detail {

/// Stochastic kernel P(x, a, .) on n_states, stored [x][a][y].
class KernelCe : public CertaintyEquivalent {
public:
    KernelCe(int n_states, int n_actions, std::vector<double> kernel)
        : n_states_(n_states), n_actions_(n_actions), kernel_(std::move(kernel)) {
        if (kernel_.size() != static_cast<std::size_t>(n_states) * n_actions * n_states)
            throw ModelError("certainty equivalent kernel has the wrong size");
    }
    int n_states() const override { return n_states_; }
    int n_pairs() const override { return n_states_ * n_actions_; }

    ValueVector apply(const ValueVector& f) const override {
        if (f.size() != n_states_) throw DimensionError("certainty equivalent input has the wrong length");
        ValueVector out(n_pairs());
        for (int k = 0; k < n_pairs(); ++k) out[k] = reduce(f.data(), kernel_.data() + static_cast<std::size_t>(k) * n_states_);
        return out;
    }

protected:
    virtual double reduce(const double* f, const double* p) const = 0;
    int n_states_;
    int n_actions_;
    std::vector<double> kernel_;
};

} // namespace detail

/// Conditional expectation under P.
class ExpectationCe final : public detail::KernelCe {
public:
    using KernelCe::KernelCe;
    std::string name() const override { return "expectation"; }

protected:
    double reduce(const double* f, const double* p) const override {
        double e = 0.0;
        for (int y = 0; y < n_states_; ++y) e += f[y] * p[y];
        return e;
    }
};

/// (E f)(x, a) = (1/theta) ln sum_y exp(theta f(y)) P(x, a, y), theta != 0.
class RiskSensitiveCe final : public detail::KernelCe {
public:
    RiskSensitiveCe(int n_states, int n_actions, std::vector<double> kernel, double theta)
        : KernelCe(n_states, n_actions, std::move(kernel)), theta_(theta) {
        if (theta == 0.0 || !std::isfinite(theta)) throw ModelError("risk-sensitive theta must be finite and nonzero");
    }
    std::string name() const override { return "risk_sensitive"; }
    double theta() const { return theta_; }

protected:
    double reduce(const double* f, const double* p) const override {
        return risk_sensitive_mean(theta_, f, p, static_cast<std::size_t>(n_states_));
    }

private:
    double theta_;
};

/// Optimistic certainty equivalent: max of f over states reachable from (x, a).
class MaxCe final : public detail::KernelCe {
public:
    using KernelCe::KernelCe;
    std::string name() const override { return "max"; }

protected:
    double reduce(const double* f, const double* p) const override {
        double m = -std::numeric_limits<double>::infinity();
        for (int y = 0; y < n_states_; ++y)
            if (p[y] > 0.0) m = std::max(m, f[y]);
        return m;
    }
};

inline std::shared_ptr<const CertaintyEquivalent> make_expectation_ce(const StructuralTables& s) {
    return std::make_shared<ExpectationCe>(s.n_states, s.n_actions, s.transition);
}
inline std::shared_ptr<const CertaintyEquivalent> make_risk_sensitive_ce(const StructuralTables& s, double theta) {
    return std::make_shared<RiskSensitiveCe>(s.n_states, s.n_actions, s.transition, theta);
}
inline std::shared_ptr<const CertaintyEquivalent> make_max_ce(const StructuralTables& s) {
    return std::make_shared<MaxCe>(s.n_states, s.n_actions, s.transition);
}

/// (T_sigma g)(x, a) = (E H_sigma g)(x, a)
inline ValueVector ce_policy_operator(const CertaintyEquivalent& ce, const StructuralTables& s, const Policy& sigma,
                                      const ValueVector& g) {
    if (ce.n_states() != s.n_states || ce.n_pairs() != s.n_pairs())
        throw DimensionError("certainty equivalent does not match the model dimensions");
    return ce.apply(structural_h(s, sigma, g));
}

struct SubadditivityViolation {
    std::size_t probe = 0;
    double excess = 0.0;
};

struct SubadditivityReport {
    int tested = 0;
    std::vector<SubadditivityViolation> violations;
    bool holds() const { return violations.empty(); }
};

/// Checks E(f + lambda) <= E f + lambda pointwise for every (f, lambda) probe.
inline SubadditivityReport check_constant_subadditive(const CertaintyEquivalent& ce,
                                                      const std::vector<std::pair<ValueVector, double>>& probes,
                                                      double tol = 1e-10) {
    SubadditivityReport rep;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const auto& [f, lambda] = probes[i];
        if (lambda < 0.0) throw PremiseError("constant subadditivity is defined for lambda >= 0");
        const ValueVector lhs = ce.apply((f.array() + lambda).matrix());
        const ValueVector rhs = (ce.apply(f).array() + lambda).matrix();
        ++rep.tested;
        const double excess = order_violation(lhs, rhs);
        if (excess > tol) rep.violations.push_back({i, excess});
    }
    return rep;
}

/// Discrete choice model with a general certainty equivalent.
class CeChoiceModel {
public:
    /// eval_tol <= 0 selects 1e-12 max(1 - beta, M).
    CeChoiceModel(StructuralTables s, std::shared_ptr<const CertaintyEquivalent> ce, double eval_tol = 0.0,
                  int eval_max_iter = 1000000)
        : s_(std::move(s)), ce_(std::move(ce)), eval_tol_(eval_tol), eval_max_iter_(eval_max_iter) {
        s_.validate();
        if (eval_tol_ <= 0.0) eval_tol_ = 1e-12 * std::max(1.0 - s_.beta, s_.reward_bound());
        if (!ce_) throw ModelError("missing certainty equivalent");
        if (ce_->n_states() != s_.n_states || ce_->n_pairs() != s_.n_pairs())
            throw ModelError("certainty equivalent does not match the model dimensions");
    }

    const StructuralTables& tables() const { return s_; }
    const CertaintyEquivalent& ce() const { return *ce_; }
    Eigen::Index size() const { return s_.n_pairs(); }
    double beta() const { return s_.beta; }

    ValueVector apply(const Policy& sigma, const ValueVector& g) const { return ce_policy_operator(*ce_, s_, sigma, g); }
    Policy greedy(const ValueVector& g) const { return struct_greedy(s_, g); }
    ValueVector evaluate(const Policy& sigma) const {
        auto op = [&](const ValueVector& g) { return apply(sigma, g); };
        return iterate_to_fixed_point(op, ValueVector::Zero(size()), eval_tol_, eval_max_iter_).value;
    }
    std::vector<Policy> policies() const { return all_policies(s_.n_states, s_.n_actions); }
    ValueVector upper_start() const { return ValueVector::Constant(size(), s_.reward_bound() / (1.0 - s_.beta)); }
    ValueVector lower_start() const { return ValueVector::Constant(size(), -s_.reward_bound() / (1.0 - s_.beta)); }

private:
    StructuralTables s_;
    std::shared_ptr<const CertaintyEquivalent> ce_;
    double eval_tol_;
    int eval_max_iter_;
};

} // namespace orderdp
