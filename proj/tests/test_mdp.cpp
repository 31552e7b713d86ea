#include <orderdp.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace orderdp;

TEST(MdpOperator, Examples) {
    const MdpTables one = single_state_mdp(1.0, 0.5);
    EXPECT_DOUBLE_EQ(mdp_policy_operator(one, Policy({0}), ValueVector::Constant(1, 4.0))[0], 3.0);

    const MdpTables zero = single_state_mdp(1.0, 0.0);
    EXPECT_DOUBLE_EQ(mdp_policy_operator(zero, Policy({0}), ValueVector::Constant(1, 123.0))[0], 1.0);

    const MdpTables t = two_state_reference_mdp();
    const ValueVector out = mdp_policy_operator(t, Policy({0, 0}), ValueVector::Zero(2));
    EXPECT_DOUBLE_EQ(out[0], 0.0);
    EXPECT_DOUBLE_EQ(out[1], 1.0);
}

TEST(MdpOperator, RejectsInfeasiblePolicy) {
    MdpTables t = two_state_reference_mdp();
    t.feasible[t.pair(1, 1)] = 0;
    EXPECT_THROW(mdp_policy_operator(t, Policy({0, 1}), ValueVector::Zero(2)), PolicyError);
    EXPECT_THROW(mdp_policy_operator(t, Policy({0}), ValueVector::Zero(2)), DimensionError);
    EXPECT_THROW(mdp_policy_operator(t, Policy({0, 0}), ValueVector::Zero(3)), DimensionError);
}

TEST(MdpPolicyValue, Examples) {
    EXPECT_DOUBLE_EQ(mdp_policy_value(single_state_mdp(1.0, 0.5), Policy({0}))[0], 2.0);
    const MdpTables t = [] {
        MdpTables m = two_state_reference_mdp();
        m.beta = 0.0;
        return m;
    }();
    const ValueVector v = mdp_policy_value(t, Policy({1, 0}));
    EXPECT_DOUBLE_EQ(v[0], 1.0);
    EXPECT_DOUBLE_EQ(v[1], 1.0);
}

TEST(MdpPolicyValue, MatchesIterationOnOracle) {
    const MdpTables t = two_state_reference_mdp();
    for (const Policy& p : MdpModel(t).policies()) {
        const ValueVector exact = mdp_policy_value(t, p);
        EXPECT_LE(sup_distance(mdp_policy_operator(t, p, exact), exact), 1e-10);
        ValueVector v = ValueVector::Zero(2);
        for (int k = 0; k < 2000; ++k) v = mdp_policy_operator(t, p, v);
        EXPECT_LE(sup_distance(v, exact), 1e-8);
    }
}

TEST(MdpGreedy, MyopicAndTies) {
    MdpTables m;
    m.n_states = 2;
    m.n_actions = 3;
    m.beta = 0.9;
    m.feasible.assign(6, 1);
    m.reward = {0, 1, 2, 0, 1, 2};
    m.transition.assign(18, 1.0 / 2.0);
    EXPECT_EQ(mdp_greedy(m, ValueVector::Zero(2)).action, (std::vector<int>{2, 2}));
    m.reward = {1, 1, 1, 5, 5, 0};
    EXPECT_EQ(mdp_greedy(m, ValueVector::Zero(2)).action, (std::vector<int>{0, 0}));
    m.feasible[m.pair(1, 0)] = 0;
    EXPECT_EQ(mdp_greedy(m, ValueVector::Zero(2)).action, (std::vector<int>{0, 1}));
}

TEST(MdpGreedy, GreedyAtOptimumIsOptimal) {
    const MdpTables t = two_state_reference_mdp();
    ValueVector best = ValueVector::Constant(2, -1e300);
    for (const Policy& p : MdpModel(t).policies()) best = best.cwiseMax(mdp_policy_value(t, p));
    const Policy s = mdp_greedy(t, best);
    EXPECT_LE(sup_distance(mdp_policy_value(t, s), best), 1e-12);
}

TEST(MdpTables, ValidationNamesFirstViolation) {
    MdpTables t = two_state_reference_mdp();
    t.transition[0] = 0.5;
    try {
        t.validate();
        FAIL();
    } catch (const ModelError& e) {
        EXPECT_NE(std::string(e.what()).find("(0,0)"), std::string::npos) << e.what();
    }
    t = two_state_reference_mdp();
    t.feasible[t.pair(0, 0)] = 0;
    t.feasible[t.pair(0, 1)] = 0;
    EXPECT_THROW(t.validate(), ModelError);
    t = two_state_reference_mdp();
    t.beta = 1.0;
    EXPECT_THROW(t.validate(), ModelError);
    t = two_state_reference_mdp();
    t.transition.pop_back();
    EXPECT_THROW(MdpModel{t}, ModelError);
}

TEST(MdpInvariants, OrderPreservingContractionBounded) {
    std::mt19937_64 rng(23);
    for (int k = 0; k < 15; ++k) {
        const MdpModel m(random_mdp(4, 3, rng));
        const auto comparable = random_comparable_pairs(100, 4, -10, 10, rng);
        const auto pairs = random_pairs(100, 4, -10, 10, rng);
        const ValueVector u = m.upper_start();
        for (const Policy& p : m.policies()) {
            auto S = [&](const ValueVector& v) { return m.apply(p, v); };
            EXPECT_TRUE(check_order_preserving(S, comparable).holds());
            EXPECT_LE(max_lipschitz_ratio(S, pairs), m.beta() + 1e-12);
            EXPECT_TRUE(leq(m.apply(p, u), u, 1e-12));
        }
    }
}

TEST(MdpInvariants, BellmanStepMatchesClassicalMax) {
    std::mt19937_64 rng(29);
    for (int k = 0; k < 30; ++k) {
        const MdpTables t = random_mdp(4, 3, rng);
        const ValueVector v = random_vector(4, -5, 5, rng);
        // Direct max over feasible actions, written out here.
        ValueVector direct(4);
        for (int x = 0; x < 4; ++x) {
            double best = -1e300;
            for (int a = 0; a < 3; ++a) {
                if (!t.is_feasible(x, a)) continue;
                double q = t.r(x, a);
                for (int y = 0; y < 4; ++y) q += t.beta * t.p(x, a, y) * v[y];
                best = std::max(best, q);
            }
            direct[x] = best;
        }
        EXPECT_LE(sup_distance(bellman(MdpModel(t), v), direct), 1e-12);
        EXPECT_LE(sup_distance(mdp_bellman_operator(t, v), direct), 1e-12);
    }
}

TEST(Empirical, DegenerateSampleGivesPointMassRows) {
    const MdpTables base = two_state_reference_mdp();
    SampleSet s;
    s.draws.assign(7, 0.0);
    s.simulator = [](int, int, double) { return 1; };
    const MdpTables e = empirical_mdp(base, s);
    for (int x = 0; x < 2; ++x)
        for (int a = 0; a < 2; ++a) {
            EXPECT_DOUBLE_EQ(e.p(x, a, 0), 0.0);
            EXPECT_DOUBLE_EQ(e.p(x, a, 1), 1.0);
        }
}

TEST(Empirical, SingleDrawStillSolves) {
    const MdpTables base = two_state_reference_mdp();
    std::mt19937_64 rng(31);
    const MdpTables e = empirical_mdp(base, uniform_samples(base, 1, rng));
    EXPECT_TRUE(verify_fundamental_optimality(MdpModel(e)).all_hold());
}

TEST(Empirical, Errors) {
    const MdpTables base = two_state_reference_mdp();
    SampleSet s;
    s.simulator = inverse_cdf_simulator(base);
    EXPECT_THROW(empirical_mdp(base, s), ModelError);
    s.draws = {0.5};
    s.simulator = [](int, int, double) { return 5; };
    EXPECT_THROW(empirical_mdp(base, s), ModelError);
}

TEST(Empirical, InverseCdfSamplerHasBaseLaw) {
    const MdpTables base = two_state_reference_mdp();
    SampleSet s;
    for (int i = 0; i < 10000; ++i) s.draws.push_back((i + 0.5) / 10000.0);
    s.simulator = inverse_cdf_simulator(base);
    const MdpTables e = empirical_mdp(base, s);
    for (std::size_t k = 0; k < base.transition.size(); ++k) EXPECT_NEAR(e.transition[k], base.transition[k], 1e-4);
}

TEST(Empirical, ErrorShrinksWithSampleSize) {
    const MdpTables base = two_state_reference_mdp();
    const ValueVector vstar = hpi(MdpModel(base), ValueVector::Zero(2)).value;
    std::vector<double> mean_err;
    for (int n : {10, 1000}) {
        double total = 0.0;
        for (int seed = 0; seed < 20; ++seed) {
            std::mt19937_64 rng(1000 + seed);
            const MdpModel e(empirical_mdp(base, uniform_samples(base, n, rng)));
            total += sup_distance(hpi(e, ValueVector::Zero(2)).value, vstar);
        }
        mean_err.push_back(total / 20);
    }
    EXPECT_LT(mean_err[1], mean_err[0]);
}
