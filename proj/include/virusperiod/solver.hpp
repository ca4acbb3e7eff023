#pragma once

// Locating omega-periodic solutions of the logarithmic system: a root of the
// period-averaged system as the starting guess, damped Newton shooting on the
// period map, Poincare iteration as fallback, and Floquet multipliers.

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "virusperiod/bounds.hpp"
#include "virusperiod/errors.hpp"
#include "virusperiod/integrate.hpp"
#include "virusperiod/model.hpp"
#include "virusperiod/parallel.hpp"

namespace virusperiod {

struct ShootingConfig {
    std::size_t max_newton_iters = 50;
    double residual_tol = 1e-10;
    std::array<double, 4> damping = {1.0, 0.5, 0.25, 0.125};
    std::size_t fallback_poincare_iters = 200;
    std::size_t samples = 256;  // uniform intervals in the returned one-period trajectory
    IntegratorConfig integrator{};

    void validate() const {
        if (!(residual_tol > 0.0)) throw PreconditionError("residual_tol must be > 0");
        if (samples < 2 || samples % 2 != 0) throw PreconditionError("orbit samples must be even and >= 2");
        integrator.validate();
    }
};

using Multipliers = std::array<std::complex<double>, 3>;

struct PeriodicOrbit {
    LogState x0;
    Trajectory trajectory;          // transformed system, uniform samples over [0, omega]
    double residual = std::numeric_limits<double>::infinity();      // sup norm of Phi(x0) - x0
    double residual_sum = std::numeric_limits<double>::infinity();  // sum of component magnitudes
    Mat3 monodromy = Mat3::Identity();
    Multipliers floquet_multipliers{};
    bool converged = false;
    std::size_t iterations = 0;       // Newton steps taken
    std::size_t poincare_iterations = 0;
    std::vector<double> residual_history;
    std::string failure;              // empty when converged
};

/// Eigenvalues of a monodromy matrix ordered by decreasing modulus.
inline Multipliers floquet(const Mat3& monodromy) {
    Eigen::EigenSolver<Mat3> es(monodromy, false);
    Multipliers out;
    for (int i = 0; i < 3; ++i) out[i] = es.eigenvalues()[i];
    std::stable_sort(out.begin(), out.end(), [](auto a, auto b) { return std::abs(a) > std::abs(b); });
    return out;
}

inline Multipliers floquet(const PeriodicOrbit& orbit) {
    if (!orbit.converged) throw PreconditionError("floquet multipliers need a converged orbit");
    return floquet(orbit.monodromy);
}

struct AveragedRoot {
    LogState x;
    double residual = 0.0;
    bool inside_box = false;
    double box_margin = -std::numeric_limits<double>::infinity();
};

namespace detail {

inline double box_margin(const Vec3& x, const AprioriBounds& b) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) m = std::min({m, x[i] - b.log_lower[i], b.log_upper[i] - x[i]});
    return m;
}

inline std::pair<Vec3, Vec3> search_box(const std::optional<AprioriBounds>& bounds) {
    if (bounds && bounds->consistent()) {
        return {Vec3(bounds->log_lower.data()), Vec3(bounds->log_upper.data())};
    }
    return {Vec3::Constant(-5.0), Vec3::Constant(5.0)};
}

inline Vec3 solve_least_squares(const Mat3& A, const Vec3& rhs) {
    Eigen::JacobiSVD<Mat3> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-12);
    return svd.solve(rhs);
}

inline double sup(const Vec3& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace detail

/// Root of the period-averaged system (every coefficient replaced by its
/// mean, states constant) by damped Newton from a 5x5x5 grid of starts over
/// the a priori box. Roots inside the box win, deepest first.
inline AveragedRoot solve_averaged(const Model& m, const std::optional<AprioriBounds>& bounds = std::nullopt) {
    const Model avg{m.coeffs.averaged(), m.a_decay};
    const auto G = [&](const Vec3& x) { return rhs_transformed(avg, 0.0, x); };
    const auto [lo, hi] = detail::search_box(bounds);

    std::vector<AveragedRoot> roots;
    constexpr int kPerAxis = 5;
    for (int i = 0; i < kPerAxis; ++i) {
        for (int j = 0; j < kPerAxis; ++j) {
            for (int k = 0; k < kPerAxis; ++k) {
                const Vec3 frac((i + 0.5) / kPerAxis, (j + 0.5) / kPerAxis, (k + 0.5) / kPerAxis);
                Vec3 x = lo + frac.cwiseProduct(hi - lo);
                try {
                    double r = detail::sup(G(x));
                    for (int it = 0; it < 100 && r > 1e-14; ++it) {
                        const Vec3 dx = detail::solve_least_squares(jacobian_transformed(avg, 0.0, x), -G(x));
                        bool moved = false;
                        for (double lam = 1.0; lam > 1e-4; lam *= 0.5) {
                            const Vec3 xt = x + lam * dx;
                            double rt = std::numeric_limits<double>::infinity();
                            try {
                                rt = detail::sup(G(xt));
                            } catch (const DivergenceError&) {
                            }
                            if (rt < r) {
                                x = xt;
                                r = rt;
                                moved = true;
                                break;
                            }
                        }
                        if (!moved) break;
                    }
                    if (r < 1e-12) {
                        AveragedRoot root{LogState(x), r, false, -std::numeric_limits<double>::infinity()};
                        if (bounds) {
                            root.box_margin = detail::box_margin(x, *bounds);
                            root.inside_box = root.box_margin >= 0.0;
                        }
                        roots.push_back(root);
                    }
                } catch (const DivergenceError&) {
                }
            }
        }
    }
    if (roots.empty()) throw ConvergenceError("averaged system: no root found from any start");
    std::stable_sort(roots.begin(), roots.end(), [](const AveragedRoot& a, const AveragedRoot& b) {
        if (a.inside_box != b.inside_box) return a.inside_box;
        if (a.box_margin != b.box_margin) return a.box_margin > b.box_margin;
        return a.residual < b.residual;
    });
    return roots.front();
}

struct PoincareResult {
    LogState x;
    std::vector<double> residuals;  // |Phi(x_j) - x_j| for each iterate
};

/// k-fold composition of the period map from x0.
inline PoincareResult poincare_iterate(const Model& m, const LogState& x0, std::size_t k,
                                       const IntegratorConfig& cfg = {}) {
    if (k < 1) throw PreconditionError("poincare_iterate needs k >= 1");
    PoincareResult out;
    out.residuals.reserve(k);
    Vec3 x = x0.v;
    for (std::size_t j = 0; j < k; ++j) {
        const Vec3 next = flow(m, System::transformed, x, 0.0, m.coeffs.omega, cfg);
        out.residuals.push_back(detail::sup(next - x));
        x = next;
    }
    out.x = LogState(x);
    return out;
}

namespace detail {

struct NewtonOutcome {
    Vec3 x;
    bool converged = false;
    Mat3 monodromy = Mat3::Identity();
    Vec3 defect = Vec3::Zero();
};

inline NewtonOutcome newton_shoot(const Model& m, Vec3 x, const ShootingConfig& cfg, PeriodicOrbit& orbit) {
    NewtonOutcome out;
    for (;;) {
        const PeriodMap pm = period_map_with_jacobian(m, x, cfg.integrator);
        const Vec3 F = pm.image - x;
        const double r = sup(F);
        orbit.residual_history.push_back(r);
        out.x = x;
        out.monodromy = pm.jacobian;
        out.defect = F;
        if (r <= cfg.residual_tol) {
            out.converged = true;
            return out;
        }
        if (orbit.iterations >= cfg.max_newton_iters) return out;

        const Vec3 dx = solve_least_squares(pm.jacobian - Mat3::Identity(), -F);
        bool accepted = false;
        for (double lam : cfg.damping) {
            const Vec3 xt = x + lam * dx;
            try {
                const double rt = sup(flow(m, System::transformed, xt, 0.0, m.coeffs.omega, cfg.integrator) - xt);
                if (rt < r) {
                    x = xt;
                    accepted = true;
                    break;
                }
            } catch (const DivergenceError&) {
            } catch (const MaxStepsError&) {
            }
        }
        ++orbit.iterations;
        if (!accepted) return out;
    }
}

}  // namespace detail

/// Damped Newton on F(x0) = Phi_omega(x0) - x0 with Jacobian M - I, where M
/// is the monodromy matrix. If Newton stalls, iterates the period map and
/// retries once from the last iterate. Never throws on non-convergence; the
/// orbit carries the failure description instead.
inline PeriodicOrbit shoot(const Model& m, const LogState& guess, const ShootingConfig& cfg = {}) {
    cfg.validate();
    PeriodicOrbit orbit;
    Vec3 x = guess.v;
    detail::NewtonOutcome best;
    double best_r = std::numeric_limits<double>::infinity();

    for (int attempt = 0; attempt < 2; ++attempt) {
        try {
            const auto res = detail::newton_shoot(m, x, cfg, orbit);
            const double r = detail::sup(res.defect);
            if (r < best_r) {
                best_r = r;
                best = res;
            }
            if (res.converged) break;
            x = res.x;
        } catch (const Error& e) {
            orbit.failure = e.what();
        }
        if (attempt == 0 && cfg.fallback_poincare_iters > 0) {
            try {
                const auto pi = poincare_iterate(m, LogState(x), cfg.fallback_poincare_iters, cfg.integrator);
                orbit.poincare_iterations += cfg.fallback_poincare_iters;
                x = pi.x.v;
            } catch (const Error& e) {
                orbit.failure = e.what();
                break;
            }
        } else {
            break;
        }
    }

    if (!std::isfinite(best_r)) {
        if (orbit.failure.empty()) orbit.failure = "shooting produced no finite iterate";
        return orbit;
    }
    orbit.x0 = LogState(best.x);
    orbit.residual = best_r;
    orbit.residual_sum = best.defect.cwiseAbs().sum();
    orbit.monodromy = best.monodromy;
    orbit.floquet_multipliers = floquet(best.monodromy);
    orbit.converged = best.converged;
    if (orbit.converged) {
        orbit.failure.clear();
    } else if (orbit.failure.empty()) {
        orbit.failure = "no convergence; best residual " + std::to_string(best_r);
    }
    try {
        orbit.trajectory = integrate_sampled(m, System::transformed, best.x, 0.0, m.coeffs.omega, cfg.samples,
                                             cfg.integrator);
    } catch (const Error& e) {
        orbit.converged = false;
        orbit.failure = e.what();
    }
    return orbit;
}

/// Guess priority: averaged-system root, then the a priori box centre, then
/// the origin of log coordinates.
inline LogState initial_guess(const Model& m, const std::optional<AprioriBounds>& bounds) {
    try {
        return solve_averaged(m, bounds).x;
    } catch (const ConvergenceError&) {
    }
    if (bounds && bounds->consistent()) {
        Vec3 c;
        for (int i = 0; i < 3; ++i) c[i] = 0.5 * (bounds->log_lower[i] + bounds->log_upper[i]);
        return LogState(c);
    }
    return LogState(0.0, 0.0, 0.0);
}

inline double radical_inverse(std::size_t i, std::size_t base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

struct MultiStartResult {
    std::vector<PeriodicOrbit> distinct;  // converged orbits, by first starting index
    std::size_t starts = 0;
    std::size_t converged = 0;
};

/// Shoots from n Halton points of the a priori box (or [-5, 5]^3 without a
/// consistent box) concurrently; orbits closer than 1e-6 at t = 0 are merged.
inline MultiStartResult multi_start(const Model& m, const std::optional<AprioriBounds>& bounds, std::size_t n,
                                    const ShootingConfig& cfg = {}, std::size_t threads = thread_cap()) {
    const auto [lo, hi] = detail::search_box(bounds);
    auto orbits = parallel_map<PeriodicOrbit>(n, threads, [&](std::size_t i) {
        const Vec3 frac(radical_inverse(i + 1, 2), radical_inverse(i + 1, 3), radical_inverse(i + 1, 5));
        return shoot(m, LogState(lo + frac.cwiseProduct(hi - lo)), cfg);
    });
    MultiStartResult out;
    out.starts = n;
    for (auto& o : orbits) {
        if (!o.converged) continue;
        ++out.converged;
        const bool seen = std::any_of(out.distinct.begin(), out.distinct.end(), [&](const PeriodicOrbit& d) {
            return detail::sup(d.x0.v - o.x0.v) <= 1e-6;
        });
        if (!seen) out.distinct.push_back(std::move(o));
    }
    return out;
}

}  // namespace virusperiod
