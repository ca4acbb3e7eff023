#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace virusperiod;

TEST(Model, ZeroFieldVanishes) {
    const auto m = fixtures::model(fixtures::zeros());
    EXPECT_EQ(rhs_original(m, 0.3, State(4.0, 2.0, 7.0)).norm(), 0.0);
    EXPECT_EQ(jacobian_transformed(m, 0.3, LogState(0.1, -2.0, 3.0)).norm(), 0.0);
}

TEST(Model, SusceptibleBalance) {
    auto c = fixtures::zeros();
    c.b = PeriodicFn::constant(1.0, 1.0);
    c.mu1 = PeriodicFn::constant(1.0, 0.1);
    const auto d = rhs_original(fixtures::model(c), 0.0, State(10.0, 1.0, 1.0));
    EXPECT_DOUBLE_EQ(d[0], 0.0);
}

TEST(Model, LogSusceptibleDecay) {
    auto c = fixtures::zeros();
    c.mu1 = PeriodicFn::constant(1.0, 1.0);
    const auto d = rhs_transformed(fixtures::model(c), 0.7, LogState(3.0, -1.0, 0.5));
    EXPECT_DOUBLE_EQ(d[0], -1.0);
}

TEST(Model, EquilibriumIsStationaryInBothSystems) {
    const auto m = fixtures::model(fixtures::c0());
    const auto e = oracle::equilibrium(oracle::c0());
    EXPECT_NEAR(e[0], 1.285714, 1e-6);
    EXPECT_NEAR(e[1], 6.224490, 1e-6);
    EXPECT_NEAR(e[2], 2.489796, 1e-6);
    EXPECT_LT(rhs_original(m, 0.0, e).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT(rhs_transformed(m, 0.0, oracle::log_equilibrium(oracle::c0())).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Model, ScalingIdentityBetweenSystems) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 3.0);
    for (const auto& c : {fixtures::c0(), fixtures::sinusoidal_b(), fixtures::hypothesis_violating()}) {
        for (auto variant : {ADecay::alpha2, ADecay::alpha1}) {
            const Model m{c, variant};
            for (int k = 0; k < 50; ++k) {
                const LogState x(u(rng), u(rng), u(rng));
                const double t = u(rng);
                const Vec3 lhs = rhs_transformed(m, t, x).cwiseProduct(from_log(x).v);
                const Vec3 rhs = rhs_original(m, t, from_log(x));
                for (int i = 0; i < 3; ++i) {
                    EXPECT_NEAR(lhs[i], rhs[i], 1e-12 * std::max(1.0, std::abs(rhs[i])));
                }
            }
        }
    }
}

TEST(Model, JacobianMatchesFiniteDifferences) {
    const auto m = fixtures::model(fixtures::c0());
    const auto rates = oracle::Rates::from(oracle::c0());
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 2.5);
    for (int k = 0; k < 100; ++k) {
        const Vec3 x(u(rng), u(rng), u(rng));
        const double t = u(rng);
        const Mat3 J = jacobian_transformed(m, t, x);
        const Mat3 ref = oracle::fd_field_jacobian(rates, t, x);
        EXPECT_LT((J - ref).cwiseAbs().maxCoeff(), 1e-5) << "at x = " << x.transpose();
        EXPECT_DOUBLE_EQ(J(2, 2), -0.2 * std::exp(x[1] - x[2]));
    }
}

TEST(Model, AlphaOneDecayChangesOnlyTheAEquation) {
    const auto c = fixtures::c0();
    const Model a2{c, ADecay::alpha2}, a1{c, ADecay::alpha1};
    const State y(2.0, 3.0, 4.0);
    const Vec3 d2 = rhs_original(a2, 0.0, y), d1 = rhs_original(a1, 0.0, y);
    EXPECT_EQ(d1[0], d2[0]);
    EXPECT_EQ(d1[1], d2[1]);
    EXPECT_NEAR(d1[2] - d2[2], -(0.2 - 0.1) * 4.0, 1e-15);
}

TEST(LogMap, RoundTrip) {
    const auto x = to_log(State(1.0, 1.0, 1.0));
    EXPECT_EQ(x.v, Vec3::Zero());
    const auto e = to_log(State(std::exp(1.0), std::exp(2.0), std::exp(3.0)));
    EXPECT_NEAR(e.x1(), 1.0, 1e-15);
    EXPECT_NEAR(e.x2(), 2.0, 1e-15);
    EXPECT_NEAR(e.x3(), 3.0, 1e-15);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int k = 0; k < 100; ++k) {
        const State y(std::exp(u(rng)), std::exp(u(rng)), std::exp(u(rng)));
        const State back = from_log(to_log(y));
        for (int i = 0; i < 3; ++i) EXPECT_NEAR(back.v[i], y.v[i], 1e-14 * y.v[i]);
    }
}

TEST(LogMap, NonPositiveComponentIsNamed) {
    try {
        to_log(State(10.0, 0.0, 1.0));
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_EQ(e.component(), "L");
    }
    EXPECT_THROW(to_log(State(1.0, 1.0, -2.0)), DomainError);
}

TEST(Model, OverflowGuard) {
    const auto m = fixtures::model(fixtures::c0());
    EXPECT_THROW(rhs_transformed(m, 0.0, LogState(0.0, 701.0, 0.0)), DivergenceError);
    EXPECT_THROW(jacobian_transformed(m, 0.0, LogState(-701.0, 0.0, 0.0)), DivergenceError);
    EXPECT_NO_THROW(rhs_transformed(m, 0.0, LogState(0.0, 300.0, 300.0)));
}
