#pragma once

// Explicit Runge-Kutta integration of the model (classic RK4 and the
// Dormand-Prince 5(4) embedded pair), joint integration of the variational
// equations for the period-map derivative, and composite Simpson quadrature.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "virusperiod/errors.hpp"
#include "virusperiod/model.hpp"

namespace virusperiod {

enum class Method { rk4, rk45 };

struct IntegratorConfig {
    Method method = Method::rk45;
    double h = 1e-2;  // fixed step (rk4)
    double rtol = 1e-9;
    double atol = 1e-11;
    std::size_t max_steps = 1'000'000;

    void validate() const {
        if (!(h > 0.0)) throw PreconditionError("integrator step h must be > 0");
        if (!(rtol > 0.0) || !(atol > 0.0)) throw PreconditionError("rtol and atol must be > 0");
        if (max_steps < 1) throw PreconditionError("max_steps must be >= 1");
    }
};

template <int N>
using VecN = Eigen::Matrix<double, N, 1>;

/// Times and states at every accepted step, t0 included.
template <int N>
struct Path {
    std::vector<double> times;
    std::vector<VecN<N>> states;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec3> states;
    System system = System::transformed;

    std::size_t size() const noexcept { return times.size(); }
    bool empty() const noexcept { return times.empty(); }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 5th-order minus embedded 4th-order weights.
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;

inline constexpr double kSafety = 0.9;
inline constexpr double kFacMin = 0.2;
inline constexpr double kFacMax = 5.0;

template <int N>
void check_finite(const VecN<N>& y, double t) {
    if (!y.allFinite()) throw DivergenceError("non-finite state at t = " + std::to_string(t));
}

template <int N>
double error_norm(const VecN<N>& err, const VecN<N>& y0, const VecN<N>& y1, double rtol, double atol) {
    double e = 0.0;
    for (int i = 0; i < y0.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        e = std::max(e, std::abs(err[i]) / sc);
    }
    return e;
}

template <int N, class F>
Path<N> run_rk4(F& f, const VecN<N>& y0, double t0, double t1, const IntegratorConfig& cfg) {
    const double span = t1 - t0;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(span / cfg.h - 1e-9)));
    if (n > cfg.max_steps) throw MaxStepsError("rk4 needs " + std::to_string(n) + " steps, over max_steps");
    const double h = span / static_cast<double>(n);

    Path<N> p;
    p.times.reserve(n + 1);
    p.states.reserve(n + 1);
    p.times.push_back(t0);
    p.states.push_back(y0);
    VecN<N> y = y0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t0 + static_cast<double>(i) * h;
        const VecN<N> k1 = f(t, y);
        const VecN<N> k2 = f(t + 0.5 * h, (y + 0.5 * h * k1).eval());
        const VecN<N> k3 = f(t + 0.5 * h, (y + 0.5 * h * k2).eval());
        const VecN<N> k4 = f(t + h, (y + h * k3).eval());
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double tn = (i + 1 == n) ? t1 : t0 + static_cast<double>(i + 1) * h;
        check_finite<N>(y, tn);
        p.times.push_back(tn);
        p.states.push_back(y);
    }
    return p;
}

template <int N, class F>
double initial_step(F& f, double t0, const VecN<N>& y0, const VecN<N>& f0, double span, const IntegratorConfig& cfg) {
    const VecN<N> sc = (cfg.atol + cfg.rtol * y0.array().abs()).matrix();
    const double d0 = (y0.array() / sc.array()).abs().maxCoeff();
    const double d1 = (f0.array() / sc.array()).abs().maxCoeff();
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    const VecN<N> y1 = y0 + h0 * f0;
    const VecN<N> f1 = f(t0 + h0, y1);
    const double d2 = ((f1 - f0).array() / sc.array()).abs().maxCoeff() / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5.0);
    return std::min({100.0 * h0, h1, span});
}

template <int N, class F>
Path<N> run_rk45(F& f, const VecN<N>& y0, double t0, double t1, const IntegratorConfig& cfg) {
    using namespace detail;
    const double span = t1 - t0;
    Path<N> p;
    p.times.push_back(t0);
    p.states.push_back(y0);

    double t = t0;
    VecN<N> y = y0;
    VecN<N> k1 = f(t, y);
    double h = initial_step<N>(f, t0, y0, k1, span, cfg);
    bool last_rejected = false;
    std::size_t steps = 0;

    while (t < t1) {
        if (++steps > cfg.max_steps) {
            throw MaxStepsError("max_steps (" + std::to_string(cfg.max_steps) + ") exceeded at t = " +
                                std::to_string(t));
        }
        bool final_step = false;
        if (t + h >= t1 || t + 1.01 * h >= t1) {
            h = t1 - t;
            final_step = true;
        }
        if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            throw DivergenceError("step size underflow at t = " + std::to_string(t));
        }

        VecN<N> y_new, k7, err;
        bool ok = true;
        try {
            const VecN<N> k2 = f(t + c2 * h, (y + h * a21 * k1).eval());
            const VecN<N> k3 = f(t + c3 * h, (y + h * (a31 * k1 + a32 * k2)).eval());
            const VecN<N> k4 = f(t + c4 * h, (y + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
            const VecN<N> k5 = f(t + c5 * h, (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
            const VecN<N> k6 = f(t + h, (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
            y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            k7 = f(t + h, y_new);
            err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            ok = y_new.allFinite() && err.allFinite();
        } catch (const DivergenceError&) {
            // A trial stage left the representable range; shrink and retry.
            ok = false;
        }

        if (!ok) {
            h *= 0.25;
            last_rejected = true;
            continue;
        }

        const double en = error_norm<N>(err, y, y_new, cfg.rtol, cfg.atol);
        if (en <= 1.0) {
            t = final_step ? t1 : t + h;
            y = y_new;
            k1 = k7;
            p.times.push_back(t);
            p.states.push_back(y);
            double fac = en == 0.0 ? kFacMax : kSafety * std::pow(en, -0.2);
            fac = std::clamp(fac, kFacMin, last_rejected ? 1.0 : kFacMax);
            h *= fac;
            last_rejected = false;
        } else {
            h *= std::max(kFacMin, kSafety * std::pow(en, -0.2));
            last_rejected = true;
        }
    }
    return p;
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 to t1 (t1 > t0), recording every step.
template <int N, class F>
Path<N> solve_ode(F&& f, const VecN<N>& y0, double t0, double t1, const IntegratorConfig& cfg) {
    cfg.validate();
    if (!(t1 > t0)) throw PreconditionError("integration needs t1 > t0");
    detail::check_finite<N>(y0, t0);
    if (cfg.method == Method::rk4) return detail::run_rk4<N>(f, y0, t0, t1, cfg);
    return detail::run_rk45<N>(f, y0, t0, t1, cfg);
}

/// Integrates segment by segment so that the result holds exactly the n + 1
/// uniform times t0 + k (t1 - t0) / n.
template <int N, class F>
Path<N> solve_ode_sampled(F&& f, const VecN<N>& y0, double t0, double t1, std::size_t n,
                          const IntegratorConfig& cfg) {
    if (n < 1) throw PreconditionError("sampled integration needs n >= 1");
    if (!(t1 > t0)) throw PreconditionError("integration needs t1 > t0");
    Path<N> p;
    p.times.reserve(n + 1);
    p.states.reserve(n + 1);
    p.times.push_back(t0);
    p.states.push_back(y0);
    VecN<N> y = y0;
    const double dt = (t1 - t0) / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double a = t0 + static_cast<double>(k) * dt;
        const double b = (k + 1 == n) ? t1 : t0 + static_cast<double>(k + 1) * dt;
        y = solve_ode<N>(f, y, a, b, cfg).states.back();
        p.times.push_back(b);
        p.states.push_back(y);
    }
    return p;
}

namespace detail {

inline auto vector_field(const Model& m, System system) {
    return [&m, system](double t, const Vec3& y) -> Vec3 {
        return system == System::original ? rhs_original(m, t, y) : rhs_transformed(m, t, y);
    };
}

inline Trajectory to_trajectory(Path<3>&& p, System system) {
    Trajectory tr;
    tr.times = std::move(p.times);
    tr.states = std::move(p.states);
    tr.system = system;
    return tr;
}

inline void check_initial(System system, const Vec3& y0) {
    if (system == System::original) {
        static const char* names[] = {"S", "L", "A"};
        for (int i = 0; i < 3; ++i) {
            if (!(y0[i] > 0.0)) throw DomainError(names[i], y0[i]);
        }
    }
}

}  // namespace detail

inline Trajectory integrate(const Model& m, System system, const Vec3& y0, double t0, double t1,
                            const IntegratorConfig& cfg = {}) {
    detail::check_initial(system, y0);
    return detail::to_trajectory(solve_ode<3>(detail::vector_field(m, system), y0, t0, t1, cfg), system);
}

/// Uniformly sampled trajectory with n + 1 points on [t0, t1].
inline Trajectory integrate_sampled(const Model& m, System system, const Vec3& y0, double t0, double t1,
                                    std::size_t n, const IntegratorConfig& cfg = {}) {
    detail::check_initial(system, y0);
    return detail::to_trajectory(solve_ode_sampled<3>(detail::vector_field(m, system), y0, t0, t1, n, cfg),
                                 system);
}

/// Endpoint of the flow over a duration; duration 0 returns y0 unchanged.
inline Vec3 flow(const Model& m, System system, const Vec3& y0, double t0, double duration,
                 const IntegratorConfig& cfg = {}) {
    if (duration == 0.0) return y0;
    if (!(duration > 0.0)) throw PreconditionError("flow duration must be >= 0");
    detail::check_initial(system, y0);
    return solve_ode<3>(detail::vector_field(m, system), y0, t0, t0 + duration, cfg).states.back();
}

struct PeriodMap {
    Vec3 image;      // Phi_omega(x0)
    Mat3 jacobian;   // d Phi_omega / d x0
};

/// Period map of the transformed system and its derivative, from the
/// variational system M' = J(t, x(t)) M, M(0) = I, integrated with the state.
inline PeriodMap period_map_with_jacobian(const Model& m, const Vec3& x0, const IntegratorConfig& cfg = {}) {
    VecN<12> z;
    z.head<3>() = x0;
    Eigen::Map<Mat3>(z.data() + 3) = Mat3::Identity();
    const auto f = [&m](double t, const VecN<12>& s) -> VecN<12> {
        const Vec3 x = s.head<3>();
        const Eigen::Map<const Mat3> M(s.data() + 3);
        VecN<12> ds;
        ds.head<3>() = rhs_transformed(m, t, x);
        Eigen::Map<Mat3>(ds.data() + 3) = jacobian_transformed(m, t, x) * M;
        return ds;
    };
    const VecN<12> end = solve_ode<12>(f, z, 0.0, m.coeffs.omega, cfg).states.back();
    return {end.head<3>(), Eigen::Map<const Mat3>(end.data() + 3)};
}

inline Mat3 monodromy(const Model& m, const LogState& x0, const IntegratorConfig& cfg = {}) {
    return period_map_with_jacobian(m, x0.v, cfg).jacobian;
}

/// Composite Simpson rule over uniformly spaced samples; the number of
/// intervals (values.size() - 1) must be even and >= 2.
inline double simpson(std::span<const double> values, double h) {
    const std::size_t n = values.size() - 1;
    if (values.size() < 3 || n % 2 != 0) throw PreconditionError("simpson needs an even number >= 2 of intervals");
    double acc = values.front() + values.back();
    for (std::size_t i = 1; i < n; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * values[i];
    return acc * h / 3.0;
}

struct QuadratureResult {
    double value = 0.0;
    std::size_t intervals = 0;
    bool converged = false;
};

inline constexpr std::size_t kQuadratureCap = std::size_t{1} << 20;

/// Composite Simpson with interval doubling from n until successive values
/// differ by less than 1e-10 relative to the integral of |g|, capped at 2^20.
template <class G>
QuadratureResult quadrature(G&& g, double a, double b, std::size_t n = 2, double rtol = 1e-10) {
    if (n < 2 || n % 2 != 0) throw PreconditionError("quadrature needs even n >= 2");
    std::vector<double> v(n + 1);
    auto sample = [&](std::size_t cells) {
        const double h = (b - a) / static_cast<double>(cells);
        v.resize(cells + 1);
        for (std::size_t i = 0; i <= cells; ++i) v[i] = g(a + static_cast<double>(i) * h);
        double abs_acc = 0.0;
        for (double x : v) abs_acc += std::abs(x);
        return std::pair{simpson(v, h), abs_acc * std::abs(h)};
    };
    auto [prev, scale] = sample(n);
    for (std::size_t cells = 2 * n; cells <= kQuadratureCap; cells *= 2) {
        const auto [cur, cur_scale] = sample(cells);
        if (std::abs(cur - prev) < rtol * std::max({std::abs(cur), cur_scale, std::numeric_limits<double>::min()})) {
            return {cur, cells, true};
        }
        prev = cur;
    }
    return {prev, kQuadratureCap, false};
}

}  // namespace virusperiod
