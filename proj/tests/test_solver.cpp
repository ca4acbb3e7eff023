#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace virusperiod;

namespace {

Vec3 ln_e() { return oracle::log_equilibrium(oracle::c0()); }

}  // namespace

TEST(Averaged, C0RootIsLogEquilibrium) {
    const auto m = fixtures::model(fixtures::c0());
    const auto r = solve_averaged(m, compute_bounds(m.coeffs));
    EXPECT_LT((r.x.v - ln_e()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(r.x.x1(), 0.251314, 1e-6);
    EXPECT_NEAR(r.x.x2(), 1.828491, 1e-6);
    EXPECT_NEAR(r.x.x3(), 0.912201, 1e-6);
    EXPECT_LT(r.residual, 1e-12);
    EXPECT_TRUE(r.inside_box);
    EXPECT_GT(r.box_margin, 0.0);
}

TEST(Averaged, SinusoidIsAveragedAway) {
    const auto a = solve_averaged(fixtures::model(fixtures::c0()));
    const auto b = solve_averaged(fixtures::model(fixtures::sinusoidal_b()));
    EXPECT_EQ(a.x.v, b.x.v);
    EXPECT_LT(b.residual, 1e-12);
}

TEST(Averaged, NoRootIsAConvergenceError) {
    // pure removal: dx1/dt = -1 everywhere
    auto c = fixtures::zeros();
    c.mu1 = PeriodicFn::constant(1.0, 1.0);
    EXPECT_THROW(solve_averaged(fixtures::model(c)), ConvergenceError);
}

TEST(Shoot, ConvergesFromPerturbedGuess) {
    const auto m = fixtures::model(fixtures::c0());
    const auto o = shoot(m, LogState(ln_e() + Vec3::Constant(0.1)));
    ASSERT_TRUE(o.converged) << o.failure;
    EXPECT_LT((o.x0.v - ln_e()).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT(o.residual, 1e-10);
    EXPECT_TRUE(o.failure.empty());
    EXPECT_EQ(o.residual_history.size(), o.iterations + 1);
}

TEST(Shoot, FixedPointNeedsAtMostOneStep) {
    const auto m = fixtures::model(fixtures::c0());
    const auto o = shoot(m, LogState(ln_e()));
    ASSERT_TRUE(o.converged);
    EXPECT_LE(o.iterations, 1u);
    EXPECT_LT(o.residual, 1e-10);
}

TEST(Shoot, ConstantCoefficientOrbitIsConstant) {
    const auto m = fixtures::model(fixtures::c0());
    const auto o = shoot(m, LogState(ln_e() - Vec3::Constant(0.2)));
    ASSERT_TRUE(o.converged);
    for (const auto& x : o.trajectory.states) EXPECT_LT((x - ln_e()).cwiseAbs().maxCoeff(), 1e-8);
}

class SinusoidalOrbit : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        model_ = new Model(fixtures::model(fixtures::sinusoidal_b()));
        orbit_ = new PeriodicOrbit(shoot(*model_, solve_averaged(*model_).x));
    }
    static void TearDownTestSuite() {
        delete orbit_;
        delete model_;
    }
    static Model* model_;
    static PeriodicOrbit* orbit_;
};

Model* SinusoidalOrbit::model_ = nullptr;
PeriodicOrbit* SinusoidalOrbit::orbit_ = nullptr;

TEST_F(SinusoidalOrbit, Converges) {
    ASSERT_TRUE(orbit_->converged) << orbit_->failure;
    EXPECT_LT(orbit_->residual, 1e-9);
    EXPECT_GE(orbit_->residual_sum, orbit_->residual);
    EXPECT_LE(orbit_->residual_sum, 3 * orbit_->residual);
}

TEST_F(SinusoidalOrbit, MatchesLongIntegrationAndStaysNearEquilibrium) {
    ASSERT_TRUE(orbit_->converged);
    const Vec3 far = flow(*model_, System::transformed, ln_e(), 0.0, 500.0);
    EXPECT_LT((far - orbit_->x0.v).cwiseAbs().maxCoeff(), 1e-7);

    const auto& tr = orbit_->trajectory;
    Vec3 acc = Vec3::Zero();
    for (std::size_t k = 0; k + 1 < tr.size(); ++k) acc += from_log(LogState(tr.states[k])).v;
    const Vec3 avg = acc / static_cast<double>(tr.size() - 1);
    const Vec3 e = oracle::equilibrium(oracle::c0());
    for (int i = 0; i < 3; ++i) EXPECT_LT(std::abs(avg[i] - e[i]) / e[i], 0.25);
}

TEST_F(SinusoidalOrbit, TrajectoryIsOnePeriodAndPeriodic) {
    const auto& tr = orbit_->trajectory;
    ASSERT_EQ(tr.size(), 257u);
    EXPECT_EQ(tr.times.front(), 0.0);
    EXPECT_EQ(tr.times.back(), 1.0);
    EXPECT_EQ(tr.system, System::transformed);
    // five periods later the solution repeats at every sample
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.size(); k += 16) {
        const Vec3 later = flow(*model_, System::transformed, tr.states[k], tr.times[k], 5.0);
        worst = std::max(worst, (later - tr.states[k]).cwiseAbs().maxCoeff());
    }
    EXPECT_LT(worst, 10 * 1e-10 + 1e3 * 1e-9);
}

TEST_F(SinusoidalOrbit, AttractingMultipliers) {
    const auto mu = floquet(*orbit_);
    for (const auto& z : mu) EXPECT_LE(std::abs(z), 1.0 + 1e-6);
    for (int i = 0; i < 2; ++i) EXPECT_GE(std::abs(mu[i]), std::abs(mu[i + 1]));
}

TEST(Shoot, DeterministicAndReportsFailure) {
    const auto m = fixtures::model(fixtures::sinusoidal_b());
    const auto a = shoot(m, LogState(0.0, 1.0, 0.5));
    const auto b = shoot(m, LogState(0.0, 1.0, 0.5));
    EXPECT_EQ(a.x0.v, b.x0.v);
    EXPECT_EQ(a.residual, b.residual);

    ShootingConfig cfg;
    cfg.max_newton_iters = 0;
    cfg.fallback_poincare_iters = 0;
    const auto f = shoot(m, LogState(0.0, 1.0, 0.5), cfg);
    EXPECT_FALSE(f.converged);
    EXPECT_FALSE(f.failure.empty());
    EXPECT_GT(f.residual, cfg.residual_tol);
    EXPECT_THROW(floquet(f), PreconditionError);
}

TEST(Shoot, PoincareFallbackRescuesStalledNewton) {
    const auto m = fixtures::model(fixtures::c0());
    ShootingConfig cfg;
    cfg.max_newton_iters = 1;
    cfg.fallback_poincare_iters = 300;
    const auto o = shoot(m, LogState(std::log(10.0), 0.0, 0.0), cfg);
    EXPECT_EQ(o.poincare_iterations, 300u);
    EXPECT_TRUE(o.converged) << o.failure;
    EXPECT_LT((o.x0.v - ln_e()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Shoot, RejectsInvalidConfig) {
    ShootingConfig cfg;
    cfg.residual_tol = 0.0;
    EXPECT_THROW(shoot(fixtures::model(fixtures::c0()), LogState(), cfg), PreconditionError);
}

TEST(Poincare, FixedPointAndAttraction) {
    const auto m = fixtures::model(fixtures::c0());
    const auto fixed = poincare_iterate(m, LogState(ln_e()), 3);
    EXPECT_LT((fixed.x.v - ln_e()).cwiseAbs().maxCoeff(), 1e-9);

    const auto r = poincare_iterate(m, to_log(State(10.0, 1.0, 1.0)), 200);
    ASSERT_EQ(r.residuals.size(), 200u);
    EXPECT_LT(r.residuals.back(), 1e-6);
    EXPECT_LT(r.residuals.back(), r.residuals.front());
    EXPECT_THROW(poincare_iterate(m, LogState(ln_e()), 0), PreconditionError);
}

TEST(Floquet, FrozenFlowAndEquilibrium) {
    const auto one = floquet(Mat3::Identity());
    for (const auto& z : one) EXPECT_EQ(z, std::complex<double>(1.0, 0.0));

    const auto m = fixtures::model(fixtures::c0());
    const auto o = shoot(m, LogState(ln_e()));
    ASSERT_TRUE(o.converged);
    const Mat3 J = oracle::fd_field_jacobian(oracle::Rates::from(oracle::c0()), 0.0, ln_e(), 1e-5);
    Eigen::EigenSolver<Mat3> es(J);
    std::vector<std::complex<double>> want;
    for (int i = 0; i < 3; ++i) want.push_back(std::exp(es.eigenvalues()[i]));
    std::sort(want.begin(), want.end(), [](auto a, auto b) { return std::abs(a) > std::abs(b); });
    const auto got = floquet(o);
    for (int i = 0; i < 3; ++i) EXPECT_LT(std::abs(got[i] - want[i]), 1e-6) << i;
}

TEST(InitialGuess, PrefersAveragedRootThenBoxCentre) {
    const auto m = fixtures::model(fixtures::c0());
    const auto b = compute_bounds(m.coeffs);
    EXPECT_LT((initial_guess(m, b).v - ln_e()).cwiseAbs().maxCoeff(), 1e-10);

    auto c = fixtures::zeros();
    c.mu1 = PeriodicFn::constant(1.0, 1.0);
    const auto g = initial_guess(fixtures::model(c), b);
    for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(g.v[i], 0.5 * (b.log_lower[i] + b.log_upper[i]));
    EXPECT_EQ(initial_guess(fixtures::model(c), std::nullopt).v, Vec3::Zero());
}

TEST(MultiStart, MergesDistinctOrbitsDeterministically) {
    const auto m = fixtures::model(fixtures::c0());
    const auto b = compute_bounds(m.coeffs);
    const auto serial = multi_start(m, b, 6, {}, 1);
    const auto threaded = multi_start(m, b, 6, {}, 3);
    EXPECT_EQ(serial.starts, 6u);
    EXPECT_GE(serial.converged, 1u);
    ASSERT_EQ(serial.distinct.size(), 1u);
    EXPECT_LT((serial.distinct[0].x0.v - ln_e()).cwiseAbs().maxCoeff(), 1e-8);
    ASSERT_EQ(threaded.distinct.size(), serial.distinct.size());
    EXPECT_EQ(threaded.converged, serial.converged);
    EXPECT_EQ(threaded.distinct[0].x0.v, serial.distinct[0].x0.v);
}

TEST(MultiStart, HaltonPoints) {
    EXPECT_DOUBLE_EQ(radical_inverse(1, 2), 0.5);
    EXPECT_DOUBLE_EQ(radical_inverse(3, 2), 0.75);
    EXPECT_DOUBLE_EQ(radical_inverse(5, 3), 2.0 / 3.0 + 1.0 / 9.0);
}
