#pragma once

// Abstract dynamic programs: a model is a family of order preserving policy
// operators {T_sigma} on a value space. The solvers below only talk to the
// model through the AdpModel concept.

#include "orderdp/errors.hpp"
#include "orderdp/order.hpp"
#include "orderdp/policy.hpp"

#include <concepts>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace orderdp {

/**
 * Requirements on a model:
 *  - size():            dimension of the value space
 *  - apply(sigma, v):   the policy operator T_sigma applied to v
 *  - greedy(v):         a v-greedy policy, T_sigma v >= T_tau v for all tau;
 *                       must be a deterministic function of v
 *  - evaluate(sigma):   the fixed point v_sigma of T_sigma
 *
 * Optionally compare(v, w, tol) (defaults to the pointwise order),
 * policies() for finite policy sets, and lower_start()/upper_start() for
 * points known to lie below/above the value function.
 */
template <class M>
concept AdpModel = requires(const M& m, const ValueVector& v, const Policy& p) {
    { m.size() } -> std::convertible_to<Eigen::Index>;
    { m.apply(p, v) } -> std::convertible_to<ValueVector>;
    { m.greedy(v) } -> std::convertible_to<Policy>;
    { m.evaluate(p) } -> std::convertible_to<ValueVector>;
};

template <class M>
concept FiniteAdpModel = AdpModel<M> && requires(const M& m) {
    { m.policies() } -> std::convertible_to<std::vector<Policy>>;
};

template <class M>
concept HasUpperStart = requires(const M& m) {
    { m.upper_start() } -> std::convertible_to<ValueVector>;
};

template <class M>
concept HasLowerStart = requires(const M& m) {
    { m.lower_start() } -> std::convertible_to<ValueVector>;
};

template <class M>
OrderResult model_compare(const M& m, const ValueVector& v, const ValueVector& w, double tol) {
    if constexpr (requires { { m.compare(v, w, tol) } -> std::same_as<OrderResult>; })
        return m.compare(v, w, tol);
    else
        return compare(v, w, tol);
}

template <class M>
bool model_leq(const M& m, const ValueVector& v, const ValueVector& w, double tol) {
    return precedes(model_compare(m, v, w, tol));
}

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 100000;
    /// Slack used for the order comparisons recorded in traces.
    double order_tol = 1e-10;
};

struct IterationRecord {
    double residual = 0.0;
    /// compare(previous iterate, new iterate)
    OrderResult order = OrderResult::Incomparable;
    Policy policy;
};

struct SolveResult {
    std::string algorithm;
    ValueVector value;
    Policy policy;
    int iterations = 0;
    double residual = 0.0;
    std::vector<IterationRecord> trace;
    /// Whether v0 <= T v0 held; the monotone convergence guarantees only
    /// apply when it did.
    bool start_in_upper_set = false;
};

struct BellmanStep {
    ValueVector value;
    Policy policy;
};

/// T v, computed as T_sigma v for sigma = greedy(v). Greedy oracles signal
/// a missing maximizer with RegularityError.
template <AdpModel M>
BellmanStep bellman_step(const M& model, const ValueVector& v) {
    Policy sigma = model.greedy(v);
    ValueVector tv = model.apply(sigma, v);
    return {std::move(tv), std::move(sigma)};
}

template <AdpModel M>
ValueVector bellman(const M& model, const ValueVector& v) {
    return bellman_step(model, v).value;
}

/// v <= T v, i.e. v lies in V_U.
template <AdpModel M>
bool in_upper_set(const M& model, const ValueVector& v, double tol) {
    return model_leq(model, v, bellman(model, v), tol);
}

/// Value function iteration: v <- T v until ||T v - v|| <= tol.
template <AdpModel M>
SolveResult vfi(const M& model, ValueVector v0, const SolverOptions& opt = {}) {
    SolveResult res;
    res.algorithm = "vfi";
    res.start_in_upper_set = in_upper_set(model, v0, opt.order_tol);
    ValueVector v = std::move(v0);
    for (int it = 1;; ++it) {
        auto step = bellman_step(model, v);
        const double r = sup_distance(step.value, v);
        res.trace.push_back({r, model_compare(model, v, step.value, opt.order_tol), std::move(step.policy)});
        v = std::move(step.value);
        if (r <= opt.tol) {
            res.iterations = it;
            res.residual = r;
            break;
        }
        if (it >= opt.max_iter || !std::isfinite(r)) throw NonConvergenceError("VFI did not converge", v, r, it);
    }
    res.policy = model.greedy(v);
    res.value = std::move(v);
    return res;
}

/// Howard policy iteration: v <- v_sigma with sigma = greedy(v). Stops when
/// the greedy policy repeats or successive values are Equal at order_tol.
/// The reported residual is the Bellman residual ||T v - v|| at the end.
template <AdpModel M>
SolveResult hpi(const M& model, ValueVector v0, const SolverOptions& opt = {}) {
    SolveResult res;
    res.algorithm = "hpi";
    res.start_in_upper_set = in_upper_set(model, v0, opt.order_tol);
    ValueVector v = std::move(v0);
    std::optional<Policy> previous;
    for (int it = 0;; ++it) {
        Policy sigma = model.greedy(v);
        if (previous && sigma == *previous) break;
        if (it >= opt.max_iter)
            throw NonConvergenceError("HPI did not terminate", v, sup_distance(bellman(model, v), v), it);
        ValueVector next = model.evaluate(sigma);
        const OrderResult ord = model_compare(model, v, next, opt.order_tol);
        res.trace.push_back({sup_distance(next, v), ord, sigma});
        res.iterations = it + 1;
        v = std::move(next);
        previous = std::move(sigma);
        if (ord == OrderResult::Equal) break;
    }
    auto step = bellman_step(model, v);
    res.residual = sup_distance(step.value, v);
    res.policy = std::move(step.policy);
    res.value = std::move(v);
    return res;
}

/// W_m v = T_sigma^m v with sigma = greedy(v).
template <AdpModel M>
ValueVector optimistic_step(const M& model, const ValueVector& v, int m, Policy* chosen = nullptr) {
    Policy sigma = model.greedy(v);
    ValueVector w = v;
    for (int j = 0; j < m; ++j) w = model.apply(sigma, w);
    if (chosen) *chosen = std::move(sigma);
    return w;
}

/// Optimistic policy iteration with m applications of the greedy policy's
/// operator per outer step; m = 1 reproduces VFI.
template <AdpModel M>
SolveResult opi(const M& model, ValueVector v0, int m, const SolverOptions& opt = {}) {
    if (m < 1) throw Error("OPI requires m >= 1");
    SolveResult res;
    res.algorithm = "opi";
    res.start_in_upper_set = in_upper_set(model, v0, opt.order_tol);
    ValueVector v = std::move(v0);
    for (int it = 1;; ++it) {
        Policy sigma;
        ValueVector w = optimistic_step(model, v, m, &sigma);
        const double r = sup_distance(w, v);
        res.trace.push_back({r, model_compare(model, v, w, opt.order_tol), std::move(sigma)});
        v = std::move(w);
        if (r <= opt.tol) {
            res.iterations = it;
            res.residual = r;
            break;
        }
        if (it >= opt.max_iter || !std::isfinite(r)) throw NonConvergenceError("OPI did not converge", v, r, it);
    }
    res.policy = model.greedy(v);
    res.value = std::move(v);
    return res;
}

struct PolicyVerdict {
    Policy policy;
    ValueVector value;
    bool optimal = false;
    bool greedy_at_optimum = false;
};

struct OptimalityReport {
    std::size_t policy_count = 0;
    /// Pointwise maximum of all policy values; equals v* when B1 holds.
    ValueVector upper_envelope;
    bool b1_greatest_element = false;
    std::optional<Policy> witness;
    ValueVector v_star;
    bool b2_bellman_fixed_point = false;
    double b2_residual = 0.0;
    /// Largest distance between v* and VFI limits from the different starts.
    double b2_multistart_gap = 0.0;
    int b2_starts = 0;
    bool b3_principle = false;
    std::vector<PolicyVerdict> verdicts;

    bool all_hold() const { return b1_greatest_element && b2_bellman_fixed_point && b3_principle; }
};

struct OptimalityOptions {
    /// Slack for value comparisons (optimality, greediness, Bellman residual).
    double tol = 1e-9;
    /// Stopping tolerance of the multi-start VFI runs.
    double vfi_tol = 1e-12;
    int vfi_max_iter = 200000;
};

/// Checks B1-B3 by brute force over the model's finite policy set.
template <FiniteAdpModel M>
OptimalityReport verify_fundamental_optimality(const M& model, const OptimalityOptions& opt = {}) {
    OptimalityReport rep;
    const auto policies = model.policies();
    rep.policy_count = policies.size();
    rep.verdicts.reserve(policies.size());
    for (const auto& p : policies) rep.verdicts.push_back({p, model.evaluate(p), false, false});
    if (rep.verdicts.empty()) return rep;

    rep.upper_envelope = rep.verdicts.front().value;
    for (const auto& vd : rep.verdicts) rep.upper_envelope = rep.upper_envelope.cwiseMax(vd.value);

    // B1: some v_sigma dominates every other policy value.
    for (const auto& vd : rep.verdicts) {
        bool greatest = true;
        for (const auto& other : rep.verdicts)
            if (!model_leq(model, other.value, vd.value, opt.tol)) {
                greatest = false;
                break;
            }
        if (greatest) {
            rep.b1_greatest_element = true;
            rep.witness = vd.policy;
            rep.v_star = vd.value;
            break;
        }
    }
    if (!rep.b1_greatest_element) return rep;

    // B2: v* solves the Bellman equation, and VFI from distinct starts lands on it.
    const BellmanStep tv = bellman_step(model, rep.v_star);
    rep.b2_residual = sup_distance(tv.value, rep.v_star);
    std::vector<ValueVector> starts{ValueVector::Zero(model.size())};
    if constexpr (HasLowerStart<M>) starts.push_back(model.lower_start());
    if constexpr (HasUpperStart<M>) starts.push_back(model.upper_start());
    bool starts_agree = true;
    SolverOptions sopt;
    sopt.tol = opt.vfi_tol;
    sopt.max_iter = opt.vfi_max_iter;
    for (const auto& s : starts) {
        try {
            const auto r = vfi(model, s, sopt);
            rep.b2_multistart_gap = std::max(rep.b2_multistart_gap, sup_distance(r.value, rep.v_star));
            ++rep.b2_starts;
        } catch (const NonConvergenceError&) {
            starts_agree = false;
        }
    }
    rep.b2_bellman_fixed_point = rep.b2_residual <= opt.tol && starts_agree && rep.b2_multistart_gap <= opt.tol;

    // B3: optimal <=> v*-greedy.
    rep.b3_principle = true;
    for (auto& vd : rep.verdicts) {
        vd.optimal = model_compare(model, vd.value, rep.v_star, opt.tol) == OrderResult::Equal;
        vd.greedy_at_optimum =
            model_compare(model, model.apply(vd.policy, rep.v_star), tv.value, opt.tol) == OrderResult::Equal;
        if (vd.optimal != vd.greedy_at_optimum) rep.b3_principle = false;
    }
    return rep;
}

struct OrderingCheck {
    std::string relation;
    int step = 0;
    double violation = 0.0;
    bool holds = true;
};

struct OrderingReport {
    int n = 0;
    int m = 0;
    std::vector<OrderingCheck> checks;

    bool all_hold() const {
        for (const auto& c : checks)
            if (!c.holds) return false;
        return true;
    }
    double worst_violation() const {
        double w = 0.0;
        for (const auto& c : checks) w = std::max(w, c.violation);
        return w;
    }
};

/**
 * Verifies the ordering between the three algorithms started from v in V_U:
 * for k = 1..n, T^k v <= W_m^k v and T^k v <= H^k v; all three sequences are
 * increasing; and at every iterate u the chain u <= T u <= W_m u <= H u
 * together with W_m u <= T^m u.
 */
template <AdpModel M>
OrderingReport check_algorithm_ordering(const M& model, const ValueVector& v, int n, int m, double tol = 1e-9) {
    if (!model_leq(model, v, bellman(model, v), tol))
        throw PremiseError("ordering check requires v <= T v (v in V_U)");
    OrderingReport rep;
    rep.n = n;
    rep.m = m;
    auto check = [&](const char* rel, int k, const ValueVector& lo, const ValueVector& hi) {
        const double viol = order_violation(lo, hi);
        rep.checks.push_back({rel, k, viol, viol <= tol});
    };
    auto chain = [&](const char* tag, int k, const ValueVector& u) {
        auto step = bellman_step(model, u);
        ValueVector w = u;
        for (int j = 0; j < m; ++j) w = model.apply(step.policy, w);
        const ValueVector h = model.evaluate(step.policy);
        ValueVector tm = u;
        for (int j = 0; j < m; ++j) tm = bellman(model, tm);
        const std::string t(tag);
        check((t + ": u <= Tu").c_str(), k, u, step.value);
        check((t + ": Tu <= W u").c_str(), k, step.value, w);
        check((t + ": W u <= H u").c_str(), k, w, h);
        check((t + ": W u <= T^m u").c_str(), k, w, tm);
    };

    ValueVector t = v, w = v, h = v;
    for (int k = 1; k <= n; ++k) {
        chain("T-iterate", k - 1, t);
        chain("W-iterate", k - 1, w);
        chain("H-iterate", k - 1, h);
        ValueVector t1 = bellman(model, t);
        ValueVector w1 = optimistic_step(model, w, m);
        ValueVector h1 = model.evaluate(model.greedy(h));
        check("T^{k-1} v <= T^k v", k, t, t1);
        check("W^{k-1} v <= W^k v", k, w, w1);
        check("H^{k-1} v <= H^k v", k, h, h1);
        t = std::move(t1);
        w = std::move(w1);
        h = std::move(h1);
        check("T^k v <= W^k v", k, t, w);
        check("T^k v <= H^k v", k, t, h);
    }
    return rep;
}

} // namespace orderdp
