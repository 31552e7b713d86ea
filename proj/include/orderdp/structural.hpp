#pragma once

// Discrete choice with expected post-action value functions g(x, a): the
// maximization sits inside the expectation over next states and shocks.

#include "orderdp/adp.hpp"
#include "orderdp/errors.hpp"
#include "orderdp/mdp.hpp"
#include "orderdp/order.hpp"
#include "orderdp/policy.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace orderdp {

/// Primitives of the structural model. Every action is feasible in every
/// state. transition is [state][action][next]; reward is
/// [state][action][shock]; values on G = X x A are indexed x * n_actions + a.
struct StructuralTables {
    int n_states = 0;
    int n_actions = 0;
    double beta = 0.0;
    std::vector<double> transition;
    std::vector<double> shock_values;
    std::vector<double> shock_weights;
    std::vector<double> reward;
    /// Declared bound M >= |r|; 0 means "use max |r|".
    double bound = 0.0;

    int n_shocks() const { return static_cast<int>(shock_weights.size()); }
    int n_pairs() const { return n_states * n_actions; }
    std::size_t pair(int x, int a) const { return static_cast<std::size_t>(x) * n_actions + a; }
    double p(int x, int a, int y) const { return transition[pair(x, a) * n_states + y]; }
    const double* row(int x, int a) const { return transition.data() + pair(x, a) * n_states; }
    double r(int x, int a, int k) const { return reward[pair(x, a) * n_shocks() + k]; }

    double reward_bound() const {
        if (bound > 0.0) return bound;
        double m = 0.0;
        for (double r : reward) m = std::max(m, std::abs(r));
        return m;
    }

    void validate() const {
        if (n_states <= 0 || n_actions <= 0) throw ModelError("n_states and n_actions must be positive");
        if (!(beta >= 0.0 && beta < 1.0)) throw ModelError("beta must lie in [0, 1), got " + std::to_string(beta));
        const auto nsa = static_cast<std::size_t>(n_pairs());
        if (transition.size() != nsa * n_states) throw ModelError("transition table has the wrong size");
        if (shock_weights.empty()) throw ModelError("shock distribution is empty");
        if (!shock_values.empty() && shock_values.size() != shock_weights.size())
            throw ModelError("shock values and weights differ in length");
        double wsum = 0.0;
        for (double w : shock_weights) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw ModelError("shock weights must be nonnegative");
            wsum += w;
        }
        if (std::abs(wsum - 1.0) > 1e-12) throw ModelError("shock weights sum to " + std::to_string(wsum));
        if (reward.size() != nsa * shock_weights.size()) throw ModelError("reward table has the wrong size");
        for (double r : reward)
            if (!std::isfinite(r)) throw ModelError("reward is not finite");
        if (bound > 0.0)
            for (double r : reward)
                if (std::abs(r) > bound) throw ModelError("reward exceeds the declared bound M");
        for (int x = 0; x < n_states; ++x)
            for (int a = 0; a < n_actions; ++a) {
                double s = 0.0;
                for (int y = 0; y < n_states; ++y) {
                    if (!(p(x, a, y) >= 0.0)) throw ModelError("negative transition probability");
                    s += p(x, a, y);
                }
                if (std::abs(s - 1.0) > 1e-12)
                    throw ModelError("transition row (" + std::to_string(x) + "," + std::to_string(a) + ") sums to " +
                                     std::to_string(s));
            }
    }
};

inline void check_structural_policy(const StructuralTables& s, const Policy& sigma) {
    if (sigma.size() != static_cast<std::size_t>(s.n_states)) throw DimensionError("policy length != n_states");
    for (int x = 0; x < s.n_states; ++x)
        if (sigma[x] < 0 || sigma[x] >= s.n_actions)
            throw PolicyError("action " + std::to_string(sigma[x]) + " out of range at state " + std::to_string(x));
}

/// sum_k [r(x, a, e_k) + beta g(x, a)] nu_k
inline double structural_choice_value(const StructuralTables& s, int x, int a, const ValueVector& g) {
    const double cont = s.beta * g[static_cast<Eigen::Index>(s.pair(x, a))];
    double out = 0.0;
    for (int k = 0; k < s.n_shocks(); ++k) out += (s.r(x, a, k) + cont) * s.shock_weights[k];
    return out;
}

/// (H_sigma g)(y) = sum_k [r(y, sigma(y), e_k) + beta g(y, sigma(y))] nu_k, a function on states.
inline ValueVector structural_h(const StructuralTables& s, const Policy& sigma, const ValueVector& g) {
    check_structural_policy(s, sigma);
    if (g.size() != s.n_pairs()) throw DimensionError("value on G has the wrong length");
    ValueVector h(s.n_states);
    for (int y = 0; y < s.n_states; ++y) h[y] = structural_choice_value(s, y, sigma[y], g);
    return h;
}

/// (T_sigma g)(x, a) = sum_y (H_sigma g)(y) P(x, a, y)
inline ValueVector struct_policy_operator(const StructuralTables& s, const Policy& sigma, const ValueVector& g) {
    const ValueVector h = structural_h(s, sigma, g);
    ValueVector out(s.n_pairs());
    for (int x = 0; x < s.n_states; ++x)
        for (int a = 0; a < s.n_actions; ++a) {
            const double* row = s.row(x, a);
            double e = 0.0;
            for (int y = 0; y < s.n_states; ++y) e += h[y] * row[y];
            out[static_cast<Eigen::Index>(s.pair(x, a))] = e;
        }
    return out;
}

/// sigma(x) in argmax_a sum_k [r(x, a, e_k) + beta g(x, a)] nu_k; lowest index on ties.
inline Policy struct_greedy(const StructuralTables& s, const ValueVector& g) {
    if (g.size() != s.n_pairs()) throw DimensionError("value on G has the wrong length");
    Policy sigma;
    sigma.action.assign(static_cast<std::size_t>(s.n_states), -1);
    for (int x = 0; x < s.n_states; ++x) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < s.n_actions; ++a) {
            const double c = structural_choice_value(s, x, a, g);
            if (c > best) {
                best = c;
                sigma[x] = a;
            }
        }
        if (sigma[x] < 0) throw RegularityError("no maximizing action at state " + std::to_string(x));
    }
    return sigma;
}

/// Exact fixed point of T_sigma on R^G: (I - beta P S_sigma) g = P rbar_sigma,
/// where S_sigma picks g(y, sigma(y)).
inline ValueVector struct_policy_value(const StructuralTables& s, const Policy& sigma) {
    check_structural_policy(s, sigma);
    const int n = s.n_pairs();
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    ValueVector b = ValueVector::Zero(n);
    ValueVector rbar(s.n_states);
    for (int y = 0; y < s.n_states; ++y) {
        double e = 0.0;
        for (int k = 0; k < s.n_shocks(); ++k) e += s.r(y, sigma[y], k) * s.shock_weights[k];
        rbar[y] = e;
    }
    for (int x = 0; x < s.n_states; ++x)
        for (int a = 0; a < s.n_actions; ++a) {
            const auto i = static_cast<Eigen::Index>(s.pair(x, a));
            for (int y = 0; y < s.n_states; ++y) {
                const double pr = s.p(x, a, y);
                A(i, static_cast<Eigen::Index>(s.pair(y, sigma[y]))) -= s.beta * pr;
                b[i] += pr * rbar[y];
            }
        }
    return Eigen::PartialPivLU<Eigen::MatrixXd>(A).solve(b);
}

inline std::vector<Policy> all_policies(int n_states, int n_actions) {
    std::vector<int> acts(static_cast<std::size_t>(n_actions));
    for (int a = 0; a < n_actions; ++a) acts[a] = a;
    return enumerate_policies(std::vector<std::vector<int>>(static_cast<std::size_t>(n_states), acts));
}

class StructuralModel {
public:
    explicit StructuralModel(StructuralTables s) : s_(std::move(s)) { s_.validate(); }

    const StructuralTables& tables() const { return s_; }
    Eigen::Index size() const { return s_.n_pairs(); }
    double beta() const { return s_.beta; }

    ValueVector apply(const Policy& sigma, const ValueVector& g) const { return struct_policy_operator(s_, sigma, g); }
    Policy greedy(const ValueVector& g) const { return struct_greedy(s_, g); }
    ValueVector evaluate(const Policy& sigma) const { return struct_policy_value(s_, sigma); }
    std::vector<Policy> policies() const { return all_policies(s_.n_states, s_.n_actions); }

    /// Corners of W = {|g| <= M / (1 - beta)}.
    ValueVector upper_start() const { return ValueVector::Constant(size(), s_.reward_bound() / (1.0 - s_.beta)); }
    ValueVector lower_start() const { return ValueVector::Constant(size(), -s_.reward_bound() / (1.0 - s_.beta)); }

    bool in_bounded_space(const ValueVector& g, double tol = 1e-12) const {
        return g.cwiseAbs().maxCoeff() <= s_.reward_bound() / (1.0 - s_.beta) + tol;
    }

private:
    StructuralTables s_;
};

/// Structural model with a single shock whose reward equals an MDP's reward
/// (infeasible MDP actions are not representable; every action must be feasible).
inline StructuralTables structural_from_mdp(const MdpTables& m) {
    for (char f : m.feasible)
        if (!f) throw ModelError("structural model requires every action to be feasible");
    StructuralTables s;
    s.n_states = m.n_states;
    s.n_actions = m.n_actions;
    s.beta = m.beta;
    s.transition = m.transition;
    s.shock_values = {0.0};
    s.shock_weights = {1.0};
    s.reward = m.reward;
    return s;
}

struct BridgeReport {
    ValueVector g_star;
    /// v(x) = max_a [r(x, a) + beta g*(x, a)]
    ValueVector v;
    /// ||T_mdp v - v||
    double residual = 0.0;
    bool holds = false;
};

/// With a degenerate shock the structural fixed point determines a state
/// value v that must solve the classical MDP Bellman equation.
inline BridgeReport struct_to_mdp_bridge(const StructuralTables& s, double tol = 1e-8) {
    s.validate();
    int atom = -1;
    for (int k = 0; k < s.n_shocks(); ++k)
        if (s.shock_weights[k] > 0.0) {
            if (atom >= 0) throw PremiseError("bridge requires a point-mass shock distribution");
            atom = k;
        }
    const StructuralModel model(s);
    BridgeReport rep;
    SolverOptions opt;
    rep.g_star = hpi(model, model.lower_start(), opt).value;

    MdpTables m;
    m.n_states = s.n_states;
    m.n_actions = s.n_actions;
    m.beta = s.beta;
    m.feasible.assign(static_cast<std::size_t>(s.n_pairs()), 1);
    m.transition = s.transition;
    m.reward.resize(static_cast<std::size_t>(s.n_pairs()));
    for (int x = 0; x < s.n_states; ++x)
        for (int a = 0; a < s.n_actions; ++a) m.reward[m.pair(x, a)] = s.r(x, a, atom);

    rep.v.resize(s.n_states);
    for (int x = 0; x < s.n_states; ++x) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < s.n_actions; ++a)
            best = std::max(best, m.r(x, a) + s.beta * rep.g_star[static_cast<Eigen::Index>(s.pair(x, a))]);
        rep.v[x] = best;
    }
    rep.residual = sup_distance(mdp_bellman_operator(m, rep.v), rep.v);
    rep.holds = rep.residual <= tol;
    return rep;
}

/// Random toy instance: rewards uniform on [-1, 1] per shock, shock weights
/// uniform on the simplex, flat-Dirichlet transition rows.
template <class Rng>
StructuralTables random_structural(int n_states, int n_actions, int n_shocks, double beta, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    StructuralTables s;
    s.n_states = n_states;
    s.n_actions = n_actions;
    s.beta = beta;
    s.transition.resize(static_cast<std::size_t>(n_states) * n_actions * n_states);
    for (int k = 0; k < n_states * n_actions; ++k) {
        double sum = 0.0;
        for (int y = 0; y < n_states; ++y) sum += (s.transition[k * n_states + y] = expo(rng));
        for (int y = 0; y < n_states; ++y) s.transition[k * n_states + y] /= sum;
    }
    double wsum = 0.0;
    for (int k = 0; k < n_shocks; ++k) {
        s.shock_values.push_back(k);
        s.shock_weights.push_back(expo(rng));
        wsum += s.shock_weights.back();
    }
    for (auto& w : s.shock_weights) w /= wsum;
    s.reward.resize(static_cast<std::size_t>(n_states) * n_actions * n_shocks);
    for (auto& r : s.reward) r = 2.0 * unif(rng) - 1.0;
    s.bound = 1.0;
    return s;
}

} // namespace orderdp
