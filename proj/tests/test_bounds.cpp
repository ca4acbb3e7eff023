#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace virusperiod;

namespace {

const double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

CoefficientSet from(const oracle::Constants& k) {
    return CoefficientSet::constants(k.omega, k.b, k.mu1, k.mu2, k.mu3, k.beta1, k.beta2, k.gamma1, k.gamma2,
                                     k.alpha1, k.alpha2);
}

}  // namespace

TEST(Hypothesis, C0) {
    const auto ref = oracle::scalar_bounds(oracle::c0());
    const auto r = check_hypothesis(fixtures::c0());
    EXPECT_TRUE(r.positivity_ok);
    EXPECT_TRUE(r.holds);
    EXPECT_NEAR(r.lhs_max, ref.lhs, 1e-12);
    EXPECT_NEAR(r.rhs_min, 0.5, 1e-12);
    ASSERT_TRUE(r.theta);
    EXPECT_NEAR(*r.theta, 8.0 / 15.0, 1e-12);
}

TEST(Hypothesis, ListedConstantSet) {
    auto k = oracle::c0();
    k.mu2 = 0.3;
    const auto r = check_hypothesis(from(k));
    EXPECT_NEAR(r.lhs_max, 0.16, 1e-12);
    EXPECT_NEAR(r.rhs_min, 0.5, 1e-12);
    EXPECT_TRUE(r.holds);
}

// alpha1 (alpha2 + gamma2) / (alpha1 + mu2) < alpha2 + gamma2 < mu3 + alpha2 + gamma2
// whenever every constant is positive.
TEST(Hypothesis, EveryPositiveConstantSetSatisfiesIt) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> logu(-6.0, 3.0);
    for (int trial = 0; trial < 500; ++trial) {
        oracle::Constants k;
        for (double* p : {&k.b, &k.mu1, &k.mu2, &k.mu3, &k.beta1, &k.beta2, &k.gamma1, &k.gamma2, &k.alpha1,
                          &k.alpha2}) {
            *p = std::pow(10.0, logu(rng));
        }
        const auto r = check_hypothesis(from(k), 64);
        EXPECT_TRUE(r.holds) << "trial " << trial;
        EXPECT_GT(*r.theta, 0.0);
        EXPECT_LT(*r.theta, 1.0);
    }
    // the near-miss set a careless reading suggests as a counterexample
    auto near = oracle::c0();
    near.alpha1 = 5.0;
    near.mu2 = 0.01;
    near.alpha2 = near.gamma2 = 0.3;
    near.mu3 = 0.001;
    const auto r = check_hypothesis(from(near));
    EXPECT_TRUE(r.holds);
    EXPECT_NEAR(r.lhs_max, 5.0 * 0.6 / 5.01, 1e-12);
    EXPECT_NEAR(r.rhs_min, 0.601, 1e-12);
}

TEST(Hypothesis, TimeVaryingGamma2Violates) {
    const auto c = fixtures::hypothesis_violating();
    const auto g2 = [](double t) { return 0.3 + 0.29 * std::sin(2 * kPi * t); };
    const auto lhs = oracle::dense_grid([&](double t) { return 0.2 * (0.1 + g2(t)) / 0.3; }, 1.0);
    const auto rhs = oracle::dense_grid([&](double t) { return 0.2 + g2(t); }, 1.0);
    ASSERT_GT(lhs.max, rhs.min);
    const auto r = check_hypothesis(c);
    EXPECT_TRUE(r.positivity_ok);
    EXPECT_FALSE(r.holds);
    EXPECT_FALSE(r.theta.has_value());
    EXPECT_NEAR(r.lhs_max, lhs.max, 1e-8);
    EXPECT_NEAR(r.rhs_min, rhs.min, 1e-8);
}

TEST(Hypothesis, TimeVaryingAlpha1AgainstDenseGrid) {
    auto c = fixtures::c0();
    c.alpha1 = PeriodicFn::fourier(1.0, 0.2, {{0.0, 0.05}});
    const auto a1 = [](double t) { return 0.2 + 0.05 * std::sin(2 * kPi * t); };
    const auto lhs = oracle::dense_grid([&](double t) { return a1(t) * 0.4 / (a1(t) + 0.1); }, 1.0);
    const auto share = oracle::dense_grid([&](double t) { return a1(t) / (a1(t) + 0.1); }, 1.0);
    const auto r = check_hypothesis(c);
    EXPECT_TRUE(r.holds);
    EXPECT_NEAR(r.lhs_max, lhs.max, 1e-8);
    EXPECT_NEAR(*r.theta, share.max * 0.4 / 0.5, 1e-8);
    EXPECT_NEAR(compute_theta(c), share.max * 0.4 / 0.5, 1e-8);
}

TEST(Hypothesis, PositivityFailureIsReported) {
    auto c = fixtures::c0();
    c.gamma2 = PeriodicFn::constant(1.0, 0.0);
    const auto r = check_hypothesis(c);
    EXPECT_FALSE(r.positivity_ok);
    EXPECT_FALSE(r.holds);
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_EQ(r.violations[0].coef, Coef::gamma2);

    const auto z = check_hypothesis(fixtures::zeros());
    EXPECT_FALSE(z.holds);
    EXPECT_EQ(z.violations.size(), 10u);
}

TEST(Theta, LargeMu2LimitAndViolation) {
    auto k = oracle::c0();
    k.mu2 = 1e3;
    const double th = compute_theta(from(k));
    EXPECT_NEAR(th, 0.2 / 1000.2 * 0.4 / 0.5, 1e-15);
    EXPECT_LT(th, 2e-4);
    EXPECT_THROW(compute_theta(fixtures::hypothesis_violating()), HypothesisError);
}

TEST(Bounds, C0AgainstScalarOracle) {
    const auto ref = oracle::scalar_bounds(oracle::c0());
    const auto b = compute_bounds(fixtures::c0());
    EXPECT_EQ(b.d1_variant, D1Variant::derivation);
    const double got[] = {b.rho[0], b.rho[1], b.rho[2], b.d[0], b.d[1], b.d[2], b.delta[0], b.delta[1], b.delta[2]};
    const double want[] = {ref.rho1, ref.rho2, ref.rho3, ref.d1, ref.d2, ref.d3, ref.delta1, ref.delta2, ref.delta3};
    for (int i = 0; i < 9; ++i) EXPECT_LT(rel(got[i], want[i]), 1e-12) << i;
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(b.log_lower[i], ref.log_lower[i], 1e-12);
        EXPECT_NEAR(b.log_upper[i], ref.log_upper[i], 1e-12);
    }
    EXPECT_NEAR(b.rho[1], 7.142857, 1e-6);
    EXPECT_NEAR(b.rho[2], 2.857143, 1e-6);
    EXPECT_NEAR(b.d[0], 4.2, 1e-12);
    EXPECT_NEAR(b.d[1], 0.8, 1e-12);
    EXPECT_NEAR(b.d[2], 1.0, 1e-12);
    EXPECT_NEAR(b.delta[0], 0.206926, 1e-6);
    EXPECT_NEAR(b.delta[1], 0.5, 1e-15);
    EXPECT_NEAR(b.delta[2], 0.4, 1e-15);
    EXPECT_TRUE(b.consistent());
}

TEST(Bounds, BallRadius) {
    const auto ref = oracle::scalar_bounds(oracle::c0());
    const double rho[] = {ref.rho1, ref.rho2, ref.rho3};
    const double d[] = {ref.d1, ref.d2, ref.d3};
    double h = 0.0;
    for (int i = 0; i < 3; ++i) h += std::max(std::abs(ref.log_lower[i]), std::abs(std::log(rho[i])) + d[i]);
    EXPECT_NEAR(compute_bounds(fixtures::c0()).ball_radius, h, 1e-12);
}

TEST(Bounds, LiteralVariantChangesOnlyD1AndDelta1) {
    const auto ref = oracle::scalar_bounds(oracle::c0());
    const auto a = compute_bounds(fixtures::c0(), D1Variant::derivation);
    const auto b = compute_bounds(fixtures::c0(), D1Variant::literal);
    EXPECT_EQ(b.d1_variant, D1Variant::literal);
    EXPECT_NEAR(b.d[0], ref.d1_literal, 1e-12);
    EXPECT_NE(a.d[0], b.d[0]);
    EXPECT_EQ(a.rho, b.rho);
    EXPECT_EQ(a.delta, b.delta);
    EXPECT_EQ(a.d[1], b.d[1]);
    EXPECT_EQ(a.d[2], b.d[2]);
    EXPECT_NE(a.log_upper[0], b.log_upper[0]);
    EXPECT_EQ(a.log_upper[1], b.log_upper[1]);
    EXPECT_EQ(a.log_lower, b.log_lower);
}

TEST(Bounds, EquilibriumInsideBox) {
    const auto b = compute_bounds(fixtures::c0());
    const auto xe = oracle::log_equilibrium(oracle::c0());
    for (int i = 0; i < 3; ++i) {
        EXPECT_LT(b.log_lower[i], xe[i]);
        EXPECT_LT(xe[i], b.log_upper[i]);
    }
    EXPECT_NEAR(b.log_upper[1] - xe[1], 0.938, 1e-3);
}

TEST(Bounds, Monotonicity) {
    const auto base = compute_bounds(fixtures::c0());
    auto k = oracle::c0();
    k.b = 1.5;
    const auto more_b = compute_bounds(from(k));
    for (int i = 0; i < 3; ++i) EXPECT_GT(more_b.rho[i], base.rho[i]);
    EXPECT_NEAR(more_b.rho[1] / base.rho[1], 1.5, 1e-12);
    k = oracle::c0();
    k.gamma1 = 0.2;
    const auto more_g = compute_bounds(from(k));
    EXPECT_GT(more_g.rho[0], base.rho[0]);
}

TEST(Bounds, PeriodicCoefficientsUseMeansAndExtrema) {
    const auto c = fixtures::sinusoidal_b();
    const auto b = compute_bounds(c);
    const auto ref = oracle::scalar_bounds(oracle::c0());
    // b enters through its mean (1) in rho and its minimum (0.5) in delta1
    EXPECT_NEAR(b.rho[1], ref.rho2, 1e-12);
    EXPECT_NEAR(b.delta[0], 0.5 * ref.delta1, 1e-10);
}

TEST(Bounds, TinyInflowGivesEmptyBox) {
    auto k = oracle::c0();
    k.b = 1e-6;
    const auto b = compute_bounds(from(k));
    EXPECT_FALSE(b.consistent());
    const auto empty = b.empty_components();
    ASSERT_FALSE(empty.empty());
    for (int i : empty) EXPECT_GE(b.log_lower[i], b.log_upper[i]);
}
