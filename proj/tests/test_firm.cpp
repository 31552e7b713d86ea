#include <orderdp.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace orderdp;

namespace {

// Golden-section search on the concave labor objective.
double profit_by_search(double p, double theta, double c, double x) {
    auto f = [&](double l) { return p * x * std::pow(l, theta) - c - l; };
    double lo = 0.0, hi = 100.0;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int i = 0; i < 300; ++i) {
        const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
        if (f(a) < f(b)) lo = a;
        else hi = b;
    }
    return f(0.5 * (lo + hi));
}

// rho by repeated squaring of K: ||K^(2^k)||^(2^-k).
double rho_by_squaring(Eigen::MatrixXd K) {
    double log_scale = 0.0;
    double est = 0.0;
    for (int k = 0; k < 40; ++k) {
        const double nrm = K.cwiseAbs().rowwise().sum().maxCoeff();
        if (nrm == 0.0) return 0.0;
        K /= nrm;
        log_scale = 2.0 * (log_scale + std::log(nrm));
        K = K * K;
        est = std::exp(log_scale / std::pow(2.0, k + 1));
    }
    return est;
}

FirmConfig small(int n, double beta, double q, double c) {
    FirmConfig cfg;
    cfg.grid_spec.size = n;
    cfg.beta = {beta};
    cfg.q = {q};
    cfg.c = c;
    return cfg;
}

} // namespace

TEST(Profit, Examples) {
    EXPECT_DOUBLE_EQ(profit(1.0, 0.3, 4.0, 0.0), -4.0);
    EXPECT_NEAR(profit(1.0, 0.5, 0.0, 1.0), 0.25, 1e-15);
    for (double x : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0})
        EXPECT_NEAR(profit(1.0, 0.3, 4.0, x), profit_by_search(1.0, 0.3, 4.0, x), 1e-8) << x;
}

TEST(Grid, Geometric) {
    const auto g = geometric_grid({200, 0.01, 5.0});
    ASSERT_EQ(g.size(), 200u);
    EXPECT_DOUBLE_EQ(g.front(), 0.01);
    EXPECT_DOUBLE_EQ(g.back(), 5.0);
    EXPECT_NEAR(g[1] / g[0], g[199] / g[198], 1e-12);
    EXPECT_THROW(geometric_grid({0, 0.01, 5.0}), ModelError);
    EXPECT_THROW(geometric_grid({5, 0.0, 5.0}), ModelError);
}

TEST(Kernel, RowsAreDistributions) {
    const FirmModel m{FirmConfig{}};
    EXPECT_TRUE(m.warnings().empty());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        EXPECT_NEAR(m.P().row(i).sum(), 1.0, 1e-12);
        EXPECT_GE(m.P().row(i).minCoeff(), 0.0);
    }
}

TEST(Kernel, NearIdentityForTinyVolatility) {
    FirmConfig cfg;
    cfg.mu_A = 0.0;
    cfg.sigma_A = 1e-6;
    const FirmModel m(cfg);
    EXPECT_LE((m.P() - Eigen::MatrixXd::Identity(200, 200)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Kernel, InteriorMeanMatchesLognormal) {
    const FirmModel m{FirmConfig{}};
    const auto& x = m.grid();
    const double growth = std::exp(-0.012 + 0.5 * 0.01);
    const double step = x[1] / x[0] - 1.0;
    for (int i = 60; i < 140; i += 10) {
        double mean = 0.0;
        for (Eigen::Index j = 0; j < m.size(); ++j) mean += m.P()(i, j) * x[j];
        EXPECT_NEAR(mean / (x[i] * growth), 1.0, step) << i;
    }
}

TEST(Kernel, CoarseGridWarns) {
    FirmConfig cfg;
    cfg.grid = {0.01, 0.02, 0.03};
    cfg.mu_A = 1.0;
    EXPECT_FALSE(FirmModel(cfg).warnings().empty());
}

TEST(Spectral, Examples) {
    EXPECT_NEAR(FirmModel{FirmConfig{}}.spectral().rho, 0.95, 1e-10);
    const auto z = spectral_radius(Eigen::MatrixXd::Zero(4, 4));
    EXPECT_EQ(z.rho, 0.0);
    EXPECT_TRUE(z.converged);
    Eigen::MatrixXd perm(2, 2);
    perm << 0, 0.5, 0.5, 0;
    EXPECT_NEAR(spectral_radius(perm).rho, 0.5, 1e-9);
}

TEST(Spectral, VaryingDiscountMatchesSquaring) {
    FirmConfig cfg;
    cfg.grid_spec.size = 50;
    std::mt19937_64 rng(139);
    std::uniform_real_distribution<double> u(0.9, 0.95);
    cfg.beta.clear();
    for (int i = 0; i < 50; ++i) cfg.beta.push_back(u(rng));
    const FirmModel m(cfg);
    const auto est = m.spectral();
    ASSERT_TRUE(est.converged);
    EXPECT_LE(est.lower, est.rho);
    EXPECT_GE(est.upper, est.rho);
    EXPECT_NEAR(est.rho, rho_by_squaring(m.K()), 1e-6);
    EXPECT_GT(est.rho, 0.9 - 1e-12);
    EXPECT_LT(est.rho, 0.95 + 1e-12);
}

TEST(Spectral, UnitDiscountRejected) {
    const FirmModel m(small(20, 1.0, 0.0, 4.0));
    EXPECT_THROW(m.require_well_posed(), WellPosednessError);
    EXPECT_THROW(m.upper_bound(), WellPosednessError);
    EXPECT_THROW(solve_firm(m, Algorithm::Vfi), WellPosednessError);
}

TEST(FirmOperator, MaskExamples) {
    const FirmModel m(small(4, 0.9, 2.0, 4.0));
    const ValueVector v = ValueVector::LinSpaced(4, -1.0, 3.0);
    const ValueVector all_exit = m.apply(Policy({1, 1, 1, 1}), v);
    EXPECT_LE(sup_distance(all_exit, m.pi() + m.K() * ValueVector::Constant(4, 2.0)), 1e-14);
    const ValueVector stay = m.apply(Policy({0, 0, 0, 0}), v);
    EXPECT_LE(sup_distance(stay, m.pi() + m.K() * v), 1e-14);
    const ValueVector mixed = m.apply(Policy({1, 0, 1, 0}), v);
    ValueVector w = v;
    w[0] = w[2] = 2.0;
    EXPECT_LE(sup_distance(mixed, m.pi() + m.K() * w), 1e-14);
    EXPECT_THROW(m.apply(Policy({2, 0, 0, 0}), v), PolicyError);
}

TEST(FirmOperator, UpperBoundIsSuperSolutionWhenNonnegative) {
    FirmConfig cfg = small(8, 0.9, 1.0, 0.0);
    const FirmModel m(cfg);
    ASSERT_GE(m.pi().minCoeff(), 0.0);
    const ValueVector vb = m.upper_bound();
    for (const Policy& p : m.policies()) EXPECT_TRUE(leq(m.apply(p, vb), vb, 1e-12));
}

TEST(FirmGreedy, Examples) {
    const FirmModel m(small(5, 0.9, 1.5, 4.0));
    EXPECT_EQ(m.greedy(ValueVector::Constant(5, 1.5)).action, std::vector<int>(5, 1));
    const FirmModel z(small(5, 0.9, 0.0, 4.0));
    EXPECT_EQ(z.greedy(ValueVector::Constant(5, 0.1)).action, std::vector<int>(5, 0));
}

TEST(UpperBound, OnePoint) {
    FirmConfig cfg;
    cfg.grid = {1.0};
    cfg.beta = {0.5};
    cfg.theta = 0.5;
    cfg.c = 0.0;
    const FirmModel m(cfg);
    ASSERT_NEAR(m.pi()[0], 0.25, 1e-15);
    EXPECT_NEAR(m.upper_bound()[0], 0.5, 1e-15);

    cfg.beta = {0.0};
    const FirmModel zero(cfg);
    EXPECT_DOUBLE_EQ(zero.upper_bound()[0], 0.25);
}

TEST(FirmSolve, NoCostNeverExits) {
    const FirmModel m(small(30, 0.95, 0.0, 0.0));
    const auto sol = solve_firm(m, Algorithm::Hpi);
    EXPECT_EQ(sol.result.policy.action, std::vector<int>(30, 0));
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(30, 30) - m.K();
    const ValueVector direct = A.fullPivLu().solve(m.pi());
    EXPECT_LE(sup_distance(sol.result.value, direct), 1e-9);
    EXPECT_FALSE(sol.threshold_x.has_value());
}

TEST(FirmSolve, TinyDiscountIsMyopic) {
    const FirmModel m(small(30, 1e-6, 0.0, 4.0));
    const auto sol = solve_firm(m, Algorithm::Vfi);
    for (Eigen::Index i = 0; i < 30; ++i) EXPECT_NEAR(sol.result.value[i], m.pi()[i], 1e-5);
}

TEST(FirmSolve, DefaultParametersAgreeAcrossAlgorithms) {
    const FirmModel m{FirmConfig{}};
    const auto v = solve_firm(m, Algorithm::Vfi);
    const auto h = solve_firm(m, Algorithm::Hpi);
    const auto o = solve_firm(m, Algorithm::Opi);
    EXPECT_LE(sup_distance(v.result.value, h.result.value), 1e-6);
    EXPECT_LE(sup_distance(o.result.value, h.result.value), 1e-6);
    EXPECT_EQ(v.result.policy, h.result.policy);
    EXPECT_EQ(o.result.policy, h.result.policy);

    // One switch: exit on a lower set, stay above it.
    const auto& a = h.result.policy.action;
    int switches = 0;
    for (std::size_t i = 1; i < a.size(); ++i) switches += a[i] != a[i - 1];
    EXPECT_LE(switches, 1);
    ASSERT_TRUE(h.threshold_x.has_value());
    for (int i = 0; i <= h.threshold_index; ++i) EXPECT_EQ(a[i], 1);

    for (Eigen::Index i = 1; i < m.size(); ++i) EXPECT_GE(h.result.value[i], h.result.value[i - 1] - 1e-9);
    EXPECT_LE(sup_distance(m.apply(h.result.policy, h.result.value), h.result.value), 1e-8);
}

TEST(FirmSolve, MiniGridOptimality) {
    const FirmModel m(firm_mini_grid_config());
    EXPECT_TRUE(verify_fundamental_optimality(m).all_hold());
    EXPECT_THROW(FirmModel{FirmConfig{}}.policies(), ModelError);
}

TEST(FirmConfig, Validation) {
    FirmConfig cfg;
    cfg.theta = 1.0;
    EXPECT_THROW(FirmModel{cfg}, ModelError);
    cfg = FirmConfig{};
    cfg.grid = {1.0, 0.5};
    EXPECT_THROW(FirmModel{cfg}, ModelError);
    cfg = FirmConfig{};
    cfg.beta = {0.9, 0.9};
    EXPECT_THROW(FirmModel{cfg}, ModelError);
    cfg = FirmConfig{};
    cfg.beta = {-0.1};
    EXPECT_THROW(FirmModel{cfg}, ModelError);
}
