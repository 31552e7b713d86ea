#pragma once

// Risk-sensitive Q-factor dynamic programs. Values live on the feasible
// state-action pairs G and the expectation over next states is replaced by
// an exponential (log-sum-exp) certainty equivalent with parameter theta.

#include "orderdp/adp.hpp"
#include "orderdp/mdp.hpp"
#include "orderdp/numerics.hpp"
#include "orderdp/order.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace orderdp {

struct QFactorTables {
    MdpTables mdp;
    double theta = 1.0;

    void validate() const {
        mdp.validate();
        if (theta == 0.0 || !std::isfinite(theta)) throw ModelError("theta must be finite and nonzero");
    }
};

/// Enumerates the feasible pairs G in (state, action) lexicographic order.
class PairIndex {
public:
    explicit PairIndex(const MdpTables& m) : n_actions_(m.n_actions), index_(m.feasible.size(), -1) {
        for (int x = 0; x < m.n_states; ++x)
            for (int a = 0; a < m.n_actions; ++a)
                if (m.is_feasible(x, a)) {
                    index_[m.pair(x, a)] = static_cast<int>(pairs_.size());
                    pairs_.push_back({x, a});
                }
    }
    int size() const { return static_cast<int>(pairs_.size()); }
    /// -1 when (x, a) is infeasible.
    int operator()(int x, int a) const { return index_[static_cast<std::size_t>(x) * n_actions_ + a]; }
    std::pair<int, int> pair(int k) const { return pairs_[static_cast<std::size_t>(k)]; }

private:
    int n_actions_;
    std::vector<int> index_;
    std::vector<std::pair<int, int>> pairs_;
};

/// (T_sigma f)(x, a) = r(x, a) + (beta/theta) ln sum_y exp(theta f(y, sigma(y))) P(x, a, y)
inline ValueVector rs_policy_operator(const QFactorTables& q, const PairIndex& g, const Policy& sigma,
                                      const ValueVector& f) {
    const MdpTables& m = q.mdp;
    check_policy(m, sigma);
    if (f.size() != g.size()) throw DimensionError("Q-factor vector length does not match |G|");
    std::vector<double> cont(static_cast<std::size_t>(m.n_states));
    for (int y = 0; y < m.n_states; ++y) cont[y] = f[g(y, sigma[y])];
    ValueVector out(g.size());
    for (int k = 0; k < g.size(); ++k) {
        const auto [x, a] = g.pair(k);
        out[k] = m.r(x, a) +
                 m.beta * risk_sensitive_mean(q.theta, cont.data(), m.row(x, a), static_cast<std::size_t>(m.n_states));
    }
    return out;
}

inline ValueVector rs_policy_operator(const QFactorTables& q, const Policy& sigma, const ValueVector& f) {
    return rs_policy_operator(q, PairIndex(q.mdp), sigma, f);
}

/// sigma(x) in argmax_{a feasible} f(x, a); lowest index on ties.
inline Policy rs_greedy(const QFactorTables& q, const PairIndex& g, const ValueVector& f) {
    const MdpTables& m = q.mdp;
    if (f.size() != g.size()) throw DimensionError("Q-factor vector length does not match |G|");
    Policy sigma;
    sigma.action.assign(static_cast<std::size_t>(m.n_states), -1);
    for (int x = 0; x < m.n_states; ++x) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < m.n_actions; ++a) {
            const int k = g(x, a);
            if (k >= 0 && f[k] > best) {
                best = f[k];
                sigma[x] = a;
            }
        }
        if (sigma[x] < 0) throw RegularityError("no maximizing action at state " + std::to_string(x));
    }
    return sigma;
}

inline Policy rs_greedy(const QFactorTables& q, const ValueVector& f) { return rs_greedy(q, PairIndex(q.mdp), f); }

class RiskModel {
public:
    /// eval_tol <= 0 selects 1e-12 max(1 - beta, max|r|), so the evaluation
    /// error stays near 1e-12 relative to the value scale max|r| / (1 - beta).
    explicit RiskModel(QFactorTables q, double eval_tol = 0.0, int eval_max_iter = 1000000)
        : q_((q.validate(), std::move(q))), index_(q_.mdp), eval_tol_(eval_tol), eval_max_iter_(eval_max_iter) {
        if (eval_tol_ <= 0.0) eval_tol_ = 1e-12 * std::max(1.0 - q_.mdp.beta, reward_scale());
    }

    const QFactorTables& tables() const { return q_; }
    const PairIndex& pairs() const { return index_; }
    Eigen::Index size() const { return index_.size(); }
    double beta() const { return q_.mdp.beta; }

    ValueVector apply(const Policy& sigma, const ValueVector& f) const {
        return rs_policy_operator(q_, index_, sigma, f);
    }
    Policy greedy(const ValueVector& f) const { return rs_greedy(q_, index_, f); }
    ValueVector evaluate(const Policy& sigma) const {
        auto op = [&](const ValueVector& f) { return apply(sigma, f); };
        return iterate_to_fixed_point(op, ValueVector::Zero(size()), eval_tol_, eval_max_iter_).value;
    }
    std::vector<Policy> policies() const {
        std::vector<std::vector<int>> sets;
        for (int x = 0; x < q_.mdp.n_states; ++x) sets.push_back(q_.mdp.feasible_actions(x));
        return enumerate_policies(sets);
    }

    ValueVector lower_start() const { return ValueVector::Constant(size(), reward_extreme(false) / (1.0 - beta())); }
    ValueVector upper_start() const { return ValueVector::Constant(size(), reward_extreme(true) / (1.0 - beta())); }

    /// v(x) = f(x, sigma(x)) for sigma greedy at f, i.e. max_a f(x, a).
    ValueVector state_values(const ValueVector& f) const {
        const Policy s = greedy(f);
        ValueVector v(q_.mdp.n_states);
        for (int x = 0; x < q_.mdp.n_states; ++x) v[x] = f[index_(x, s[x])];
        return v;
    }

private:
    double reward_scale() const { return std::max(std::abs(reward_extreme(true)), std::abs(reward_extreme(false))); }
    double reward_extreme(bool max) const {
        double e = max ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
        for (int k = 0; k < index_.size(); ++k) {
            const auto [x, a] = index_.pair(k);
            e = max ? std::max(e, q_.mdp.r(x, a)) : std::min(e, q_.mdp.r(x, a));
        }
        return e;
    }

    QFactorTables q_;
    PairIndex index_;
    double eval_tol_;
    int eval_max_iter_;
};

} // namespace orderdp
