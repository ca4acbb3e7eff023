#pragma once

// Right-hand sides of the SLA system in natural (S, L, A) and logarithmic
// (x1, x2, x3) coordinates, the map between them, and the analytic Jacobian
// of the logarithmic system.

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "virusperiod/errors.hpp"
#include "virusperiod/periodic_fn.hpp"

namespace virusperiod {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kExpCap = 700.0;

/// Compartment counts; all three strictly positive.
struct State {
    Vec3 v = Vec3::Ones();

    State() = default;
    State(double s, double l, double a) : v(s, l, a) {}
    explicit State(const Vec3& values) : v(values) {}

    double S() const { return v[0]; }
    double L() const { return v[1]; }
    double A() const { return v[2]; }
};

/// Componentwise logarithm of a State.
struct LogState {
    Vec3 v = Vec3::Zero();

    LogState() = default;
    LogState(double x1, double x2, double x3) : v(x1, x2, x3) {}
    explicit LogState(const Vec3& values) : v(values) {}

    double x1() const { return v[0]; }
    double x2() const { return v[1]; }
    double x3() const { return v[2]; }
};

inline LogState to_log(const State& y) {
    static const char* names[] = {"S", "L", "A"};
    Vec3 x;
    for (int i = 0; i < 3; ++i) {
        if (!(y.v[i] > 0.0)) throw DomainError(names[i], y.v[i]);
        x[i] = std::log(y.v[i]);
    }
    return LogState(x);
}

inline State from_log(const LogState& x) { return State(x.v.array().exp().matrix()); }

enum class System { original, transformed };

/// Which rate multiplies A in the loss term of dA/dt. alpha2 makes the two
/// coordinate systems equivalent; alpha1 reproduces the original-system
/// A-equation, kept for comparison runs only.
enum class ADecay { alpha2, alpha1 };

/// Coefficients plus the A-decay convention; everything the vector fields need.
struct Model {
    CoefficientSet coeffs;
    ADecay a_decay = ADecay::alpha2;

    double decay_a(double t) const {
        const double rate = a_decay == ADecay::alpha2 ? coeffs.alpha2(t) : coeffs.alpha1(t);
        return coeffs.mu3(t) + rate + coeffs.gamma2(t);
    }
};

namespace detail {

inline double guarded_exp(double arg) {
    if (!(arg <= kExpCap)) {
        throw DivergenceError("exponent argument " + std::to_string(arg) + " exceeds overflow cap");
    }
    return std::exp(arg);
}

}  // namespace detail

inline Vec3 rhs_original(const Model& m, double t, const Vec3& y) {
    const auto& c = m.coeffs;
    const double S = y[0], L = y[1], A = y[2];
    const double infection = c.beta1(t) * S * L + c.beta2(t) * S * A;
    return {c.b(t) - c.mu1(t) * S - infection + c.gamma1(t) * L + c.gamma2(t) * A,
            infection + c.alpha2(t) * A - (c.mu2(t) + c.alpha1(t) + c.gamma1(t)) * L,
            c.alpha1(t) * L - m.decay_a(t) * A};
}

inline Vec3 rhs_original(const Model& m, double t, const State& y) { return rhs_original(m, t, y.v); }

inline Vec3 rhs_transformed(const Model& m, double t, const Vec3& x) {
    using detail::guarded_exp;
    const auto& c = m.coeffs;
    const double x1 = x[0], x2 = x[1], x3 = x[2];
    return {c.b(t) * guarded_exp(-x1) - c.beta1(t) * guarded_exp(x2) - c.beta2(t) * guarded_exp(x3) +
                c.gamma1(t) * guarded_exp(x2 - x1) + c.gamma2(t) * guarded_exp(x3 - x1) - c.mu1(t),
            c.beta1(t) * guarded_exp(x1) + c.beta2(t) * guarded_exp(x1 + x3 - x2) +
                c.alpha2(t) * guarded_exp(x3 - x2) - (c.mu2(t) + c.alpha1(t) + c.gamma1(t)),
            c.alpha1(t) * guarded_exp(x2 - x3) - m.decay_a(t)};
}

inline Vec3 rhs_transformed(const Model& m, double t, const LogState& x) { return rhs_transformed(m, t, x.v); }

/// d(rhs_transformed)_i / d x_j.
inline Mat3 jacobian_transformed(const Model& m, double t, const Vec3& x) {
    using detail::guarded_exp;
    const auto& c = m.coeffs;
    const double x1 = x[0], x2 = x[1], x3 = x[2];

    const double b_e = c.b(t) * guarded_exp(-x1);
    const double g1_e = c.gamma1(t) * guarded_exp(x2 - x1);
    const double g2_e = c.gamma2(t) * guarded_exp(x3 - x1);
    const double b1_l = c.beta1(t) * guarded_exp(x2);
    const double b2_a = c.beta2(t) * guarded_exp(x3);

    const double b1_s = c.beta1(t) * guarded_exp(x1);
    const double b2_sal = c.beta2(t) * guarded_exp(x1 + x3 - x2);
    const double a2_al = c.alpha2(t) * guarded_exp(x3 - x2);

    const double a1_la = c.alpha1(t) * guarded_exp(x2 - x3);

    Mat3 J;
    J << -b_e - g1_e - g2_e, -b1_l + g1_e, -b2_a + g2_e,
         b1_s + b2_sal, -b2_sal - a2_al, b2_sal + a2_al,
         0.0, a1_la, -a1_la;
    return J;
}

inline Mat3 jacobian_transformed(const Model& m, double t, const LogState& x) {
    return jacobian_transformed(m, t, x.v);
}

}  // namespace virusperiod
