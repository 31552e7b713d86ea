#pragma once

// Finite Markov decision processes as abstract dynamic programs on R^X with
// the pointwise order.

#include "orderdp/adp.hpp"
#include "orderdp/errors.hpp"
#include "orderdp/order.hpp"
#include "orderdp/policy.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace orderdp {

/// Dense tables of a finite MDP. Arrays are row-major:
/// feasible/reward are [state][action], transition is [state][action][next].
struct MdpTables {
    int n_states = 0;
    int n_actions = 0;
    double beta = 0.0;
    std::vector<char> feasible;
    std::vector<double> reward;
    std::vector<double> transition;

    std::size_t pair(int x, int a) const { return static_cast<std::size_t>(x) * n_actions + a; }
    bool is_feasible(int x, int a) const { return feasible[pair(x, a)] != 0; }
    double r(int x, int a) const { return reward[pair(x, a)]; }
    double p(int x, int a, int y) const { return transition[pair(x, a) * n_states + y]; }
    const double* row(int x, int a) const { return transition.data() + pair(x, a) * n_states; }

    std::vector<int> feasible_actions(int x) const {
        std::vector<int> out;
        for (int a = 0; a < n_actions; ++a)
            if (is_feasible(x, a)) out.push_back(a);
        return out;
    }

    /// Throws ModelError describing the first violated invariant.
    void validate(double stochastic_tol = 1e-12) const {
        if (n_states <= 0) throw ModelError("n_states must be positive");
        if (n_actions <= 0) throw ModelError("n_actions must be positive");
        if (!(beta >= 0.0 && beta < 1.0)) throw ModelError("beta must lie in [0, 1), got " + std::to_string(beta));
        const auto nsa = static_cast<std::size_t>(n_states) * n_actions;
        if (feasible.size() != nsa)
            throw ModelError("feasible has " + std::to_string(feasible.size()) + " entries, expected " +
                             std::to_string(nsa));
        if (reward.size() != nsa)
            throw ModelError("reward has " + std::to_string(reward.size()) + " entries, expected " +
                             std::to_string(nsa));
        if (transition.size() != nsa * n_states)
            throw ModelError("transition has " + std::to_string(transition.size()) + " entries, expected " +
                             std::to_string(nsa * n_states));
        for (int x = 0; x < n_states; ++x) {
            bool any = false;
            for (int a = 0; a < n_actions; ++a) {
                if (!is_feasible(x, a)) continue;
                any = true;
                const std::string where = "(" + std::to_string(x) + "," + std::to_string(a) + ")";
                if (!std::isfinite(r(x, a))) throw ModelError("reward at " + where + " is not finite");
                double sum = 0.0;
                for (int y = 0; y < n_states; ++y) {
                    const double q = p(x, a, y);
                    if (!(q >= 0.0) || !std::isfinite(q))
                        throw ModelError("transition at " + where + " has a negative or non-finite entry");
                    sum += q;
                }
                if (std::abs(sum - 1.0) > stochastic_tol)
                    throw ModelError("transition row at " + where + " sums to " + std::to_string(sum));
            }
            if (!any) throw ModelError("state " + std::to_string(x) + " has no feasible action");
        }
    }
};

inline void check_policy(const MdpTables& m, const Policy& sigma) {
    if (sigma.size() != static_cast<std::size_t>(m.n_states))
        throw DimensionError("policy length " + std::to_string(sigma.size()) + " != n_states " +
                             std::to_string(m.n_states));
    for (int x = 0; x < m.n_states; ++x) {
        const int a = sigma[x];
        if (a < 0 || a >= m.n_actions || !m.is_feasible(x, a))
            throw PolicyError("action " + std::to_string(a) + " is not feasible at state " + std::to_string(x));
    }
}

/// r(x, a) + beta * sum_y v(y) P(x, a, y)
inline double mdp_action_value(const MdpTables& m, int x, int a, const ValueVector& v) {
    const double* row = m.row(x, a);
    double ev = 0.0;
    for (int y = 0; y < m.n_states; ++y) ev += row[y] * v[y];
    return m.r(x, a) + m.beta * ev;
}

/// (T_sigma v)(x) = r(x, sigma(x)) + beta sum_y v(y) P(x, sigma(x), y)
inline ValueVector mdp_policy_operator(const MdpTables& m, const Policy& sigma, const ValueVector& v) {
    check_policy(m, sigma);
    if (v.size() != m.n_states) throw DimensionError("value vector length does not match n_states");
    ValueVector out(m.n_states);
    for (int x = 0; x < m.n_states; ++x) out[x] = mdp_action_value(m, x, sigma[x], v);
    return out;
}

inline Eigen::MatrixXd policy_transition_matrix(const MdpTables& m, const Policy& sigma) {
    Eigen::MatrixXd P(m.n_states, m.n_states);
    for (int x = 0; x < m.n_states; ++x)
        for (int y = 0; y < m.n_states; ++y) P(x, y) = m.p(x, sigma[x], y);
    return P;
}

/// v_sigma = (I - beta P_sigma)^{-1} r_sigma by LU with partial pivoting.
inline ValueVector mdp_policy_value(const MdpTables& m, const Policy& sigma) {
    check_policy(m, sigma);
    const Eigen::MatrixXd A =
        Eigen::MatrixXd::Identity(m.n_states, m.n_states) - m.beta * policy_transition_matrix(m, sigma);
    ValueVector r(m.n_states);
    for (int x = 0; x < m.n_states; ++x) r[x] = m.r(x, sigma[x]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    if (!(lu.rcond() > 0.0)) throw ModelError("policy evaluation system is singular");
    ValueVector v = lu.solve(r);
    if (!v.allFinite()) throw ModelError("policy evaluation produced non-finite values");
    return v;
}

/// Greedy policy at v; ties go to the lowest action index.
inline Policy mdp_greedy(const MdpTables& m, const ValueVector& v) {
    if (v.size() != m.n_states) throw DimensionError("value vector length does not match n_states");
    Policy sigma;
    sigma.action.assign(static_cast<std::size_t>(m.n_states), -1);
    for (int x = 0; x < m.n_states; ++x) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < m.n_actions; ++a) {
            if (!m.is_feasible(x, a)) continue;
            const double q = mdp_action_value(m, x, a, v);
            if (q > best) {
                best = q;
                sigma[x] = a;
            }
        }
        if (sigma[x] < 0) throw RegularityError("no maximizing action at state " + std::to_string(x));
    }
    return sigma;
}

/// (T v)(x) = max_{a feasible} {r(x,a) + beta sum_y v(y) P(x,a,y)}, computed
/// directly without going through a policy.
inline ValueVector mdp_bellman_operator(const MdpTables& m, const ValueVector& v) {
    ValueVector out(m.n_states);
    for (int x = 0; x < m.n_states; ++x) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < m.n_actions; ++a)
            if (m.is_feasible(x, a)) best = std::max(best, mdp_action_value(m, x, a, v));
        out[x] = best;
    }
    return out;
}

class MdpModel {
public:
    explicit MdpModel(MdpTables tables) : t_(std::move(tables)) { t_.validate(); }

    const MdpTables& tables() const { return t_; }
    Eigen::Index size() const { return t_.n_states; }
    double beta() const { return t_.beta; }

    ValueVector apply(const Policy& sigma, const ValueVector& v) const { return mdp_policy_operator(t_, sigma, v); }
    Policy greedy(const ValueVector& v) const { return mdp_greedy(t_, v); }
    ValueVector evaluate(const Policy& sigma) const { return mdp_policy_value(t_, sigma); }

    std::vector<Policy> policies() const {
        std::vector<std::vector<int>> sets;
        for (int x = 0; x < t_.n_states; ++x) sets.push_back(t_.feasible_actions(x));
        return enumerate_policies(sets);
    }

    /// max r / (1 - beta): T_sigma u <= u for every sigma.
    ValueVector upper_start() const { return ValueVector::Constant(t_.n_states, reward_max() / (1.0 - t_.beta)); }
    /// min r / (1 - beta): lies in V_U.
    ValueVector lower_start() const { return ValueVector::Constant(t_.n_states, reward_min() / (1.0 - t_.beta)); }

    double reward_max() const { return reward_extreme(true); }
    double reward_min() const { return reward_extreme(false); }

private:
    double reward_extreme(bool max) const {
        double e = max ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
        for (int x = 0; x < t_.n_states; ++x)
            for (int a = 0; a < t_.n_actions; ++a)
                if (t_.is_feasible(x, a)) e = max ? std::max(e, t_.r(x, a)) : std::min(e, t_.r(x, a));
        return e;
    }

    MdpTables t_;
};

/// Two states, two actions, r(x, a) = x + a, beta = 0.9, and
/// P(x, a, .) = [0.7, 0.3] for a = 0, [0.2, 0.8] for a = 1.
inline MdpTables two_state_reference_mdp() {
    MdpTables m;
    m.n_states = 2;
    m.n_actions = 2;
    m.beta = 0.9;
    m.feasible.assign(4, 1);
    m.reward = {0.0, 1.0, 1.0, 2.0};
    m.transition = {0.7, 0.3, 0.2, 0.8, 0.7, 0.3, 0.2, 0.8};
    return m;
}

/// One state, single action with reward r.
inline MdpTables single_state_mdp(double r, double beta) {
    MdpTables m;
    m.n_states = 1;
    m.n_actions = 1;
    m.beta = beta;
    m.feasible = {1};
    m.reward = {r};
    m.transition = {1.0};
    return m;
}

/// Random instance: rewards uniform on [-1, 1], transition rows uniform on the
/// simplex, beta drawn from {0.5, 0.9, 0.99}. Roughly one in five
/// state-action pairs is infeasible (never all of a state's actions).
template <class Rng>
MdpTables random_mdp(int n_states, int n_actions, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    static constexpr double betas[] = {0.5, 0.9, 0.99};
    MdpTables m;
    m.n_states = n_states;
    m.n_actions = n_actions;
    m.beta = betas[std::uniform_int_distribution<int>(0, 2)(rng)];
    const auto nsa = static_cast<std::size_t>(n_states) * n_actions;
    m.feasible.assign(nsa, 1);
    m.reward.assign(nsa, 0.0);
    m.transition.assign(nsa * n_states, 0.0);
    for (int x = 0; x < n_states; ++x) {
        const int keep = std::uniform_int_distribution<int>(0, n_actions - 1)(rng);
        for (int a = 0; a < n_actions; ++a) {
            if (a != keep && unif(rng) < 0.2) m.feasible[m.pair(x, a)] = 0;
            m.reward[m.pair(x, a)] = 2.0 * unif(rng) - 1.0;
            double sum = 0.0;
            double* row = m.transition.data() + m.pair(x, a) * n_states;
            for (int y = 0; y < n_states; ++y) sum += (row[y] = expo(rng));
            for (int y = 0; y < n_states; ++y) row[y] /= sum;
        }
    }
    return m;
}

} // namespace orderdp
