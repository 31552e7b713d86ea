#pragma once

// Empirical dynamic programming at one fixed sample realization: the
// expectation over P(x, a, .) is replaced by an average over n simulated
// successors F(x, a, xi_i), which is an MDP with the empirical kernel.

#include "orderdp/errors.hpp"
#include "orderdp/mdp.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <vector>

namespace orderdp {

/// Simulator F(state, action, shock) -> next state.
using Simulator = std::function<int(int, int, double)>;

struct SampleSet {
    /// Shock draws xi_1..xi_n, shared by every state-action pair.
    std::vector<double> draws;
    Simulator simulator;
};

/// MDP with P_hat(x, a, y) = #{i : F(x, a, xi_i) = y} / n.
inline MdpTables empirical_mdp(const SampleSet& samples, int n_states, int n_actions, std::vector<char> feasible,
                               std::vector<double> reward, double beta) {
    if (samples.draws.empty()) throw ModelError("empirical MDP needs at least one sample draw");
    if (!samples.simulator) throw ModelError("empirical MDP needs a simulator");
    MdpTables m;
    m.n_states = n_states;
    m.n_actions = n_actions;
    m.beta = beta;
    m.feasible = std::move(feasible);
    m.reward = std::move(reward);
    const auto nsa = static_cast<std::size_t>(n_states) * n_actions;
    if (m.feasible.size() != nsa || m.reward.size() != nsa)
        throw ModelError("feasible/reward tables do not match n_states * n_actions");
    m.transition.assign(nsa * n_states, 0.0);
    const double w = 1.0 / static_cast<double>(samples.draws.size());
    for (int x = 0; x < n_states; ++x)
        for (int a = 0; a < n_actions; ++a) {
            if (!m.is_feasible(x, a)) continue;
            double* row = m.transition.data() + m.pair(x, a) * n_states;
            for (double xi : samples.draws) {
                const int y = samples.simulator(x, a, xi);
                if (y < 0 || y >= n_states)
                    throw ModelError("simulator returned invalid state " + std::to_string(y));
                row[y] += w;
            }
        }
    // Summing n copies of 1/n drifts from 1 by a few ulps; renormalize.
    for (std::size_t k = 0; k < nsa; ++k) {
        double* row = m.transition.data() + k * n_states;
        double s = 0.0;
        for (int y = 0; y < n_states; ++y) s += row[y];
        if (s > 0.0)
            for (int y = 0; y < n_states; ++y) row[y] /= s;
    }
    m.validate();
    return m;
}

/// Inverse-CDF sampler of the base kernel: with xi ~ U(0,1), F(x, a, xi) has
/// law P(x, a, .).
inline Simulator inverse_cdf_simulator(const MdpTables& base) {
    return [base](int x, int a, double xi) {
        const double* row = base.row(x, a);
        double c = 0.0;
        int last = 0;
        for (int y = 0; y < base.n_states; ++y) {
            if (row[y] <= 0.0) continue;
            c += row[y];
            last = y;
            if (xi < c) return y;
        }
        return last;
    };
}

/// n uniform draws from a seeded generator: one realization omega.
template <class Rng>
SampleSet uniform_samples(const MdpTables& base, int n, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    SampleSet s;
    s.draws.resize(static_cast<std::size_t>(n));
    for (auto& d : s.draws) d = unif(rng);
    s.simulator = inverse_cdf_simulator(base);
    return s;
}

/// Empirical counterpart of `base` built from the given sample realization.
inline MdpTables empirical_mdp(const MdpTables& base, const SampleSet& samples) {
    return empirical_mdp(samples, base.n_states, base.n_actions, base.feasible, base.reward, base.beta);
}

} // namespace orderdp
