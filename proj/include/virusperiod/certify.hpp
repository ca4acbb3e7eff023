#pragma once

// Checks a computed orbit against every identity and bound that a positive
// periodic solution must satisfy, and aggregates them into a certificate.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "virusperiod/bounds.hpp"
#include "virusperiod/errors.hpp"
#include "virusperiod/integrate.hpp"
#include "virusperiod/model.hpp"
#include "virusperiod/solver.hpp"

namespace virusperiod {

struct PeriodicityCheck {
    double residual = 0.0;    // |x(omega) - x(0)|
    double spot_check = 0.0;  // worst |Phi(x(t_k)) - x(t_k)| over 8 interior phases
    bool pass = false;
};

namespace detail {

inline void require_trajectory(const Trajectory& tr, double omega) {
    if (tr.size() < 2) throw PreconditionError("orbit has no trajectory");
    if (std::abs(tr.times.front()) > 1e-12 * omega || std::abs(tr.times.back() - omega) > 1e-9 * omega) {
        throw PreconditionError("orbit trajectory must span exactly one period [0, omega]");
    }
}

}  // namespace detail

/// The endpoint mismatch must be within tol; the spot check re-integrates one
/// period from 8 phases and allows 10 tol plus 1e3 rtol of integration error.
inline PeriodicityCheck check_periodicity(const Model& m, const PeriodicOrbit& orbit, double tol,
                                          const IntegratorConfig& cfg = {}) {
    const auto& tr = orbit.trajectory;
    detail::require_trajectory(tr, m.coeffs.omega);
    PeriodicityCheck c;
    c.residual = detail::sup(tr.states.back() - tr.states.front());
    const std::size_t n = tr.size() - 1;
    for (std::size_t k = 1; k <= 8; ++k) {
        const std::size_t idx = std::min(n, (k * n) / 9);
        const Vec3 back = flow(m, System::transformed, tr.states[idx], tr.times[idx], m.coeffs.omega, cfg);
        c.spot_check = std::max(c.spot_check, detail::sup(back - tr.states[idx]));
    }
    c.pass = c.residual <= tol && c.spot_check <= 10.0 * tol + 1e3 * cfg.rtol;
    return c;
}

struct BoxCheck {
    bool inconsistent = false;         // bounds describe an empty box
    std::array<double, 3> lower_margin{};  // min_t x_i(t) - ln delta_i
    std::array<double, 3> upper_margin{};  // ln(rho_i/omega) + d_i - max_t x_i(t)
    std::array<bool, 3> lower_ok{};
    std::array<bool, 3> upper_ok{};

    bool pass() const {
        if (inconsistent) return false;
        for (int i = 0; i < 3; ++i) {
            if (!lower_ok[i] || !upper_ok[i]) return false;
        }
        return true;
    }
};

inline BoxCheck check_box(const PeriodicOrbit& orbit, const AprioriBounds& bounds, double slack = 1e-9) {
    BoxCheck c;
    if (!bounds.consistent()) {
        c.inconsistent = true;
        return c;
    }
    const auto& tr = orbit.trajectory;
    if (tr.empty()) throw PreconditionError("orbit has no trajectory");
    if (tr.system != System::transformed) throw PreconditionError("box check needs log coordinates");
    for (int i = 0; i < 3; ++i) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& x : tr.states) {
            lo = std::min(lo, x[i]);
            hi = std::max(hi, x[i]);
        }
        c.lower_margin[i] = lo - bounds.log_lower[i];
        c.upper_margin[i] = bounds.log_upper[i] - hi;
        c.lower_ok[i] = c.lower_margin[i] >= -slack;
        c.upper_ok[i] = c.upper_margin[i] >= -slack;
    }
    return c;
}

/// Relative residuals |lhs - rhs| / max(|lhs|, |rhs|) of the six period
/// integrals that vanish along any periodic solution: three from integrating
/// x_i' and three from integrating (exp x_i)'. Requires a uniform trajectory
/// over exactly one period with an even number of intervals.
inline std::array<double, 6> check_integral_identities(const Model& m, const PeriodicOrbit& orbit) {
    const auto& tr = orbit.trajectory;
    const auto& c = m.coeffs;
    detail::require_trajectory(tr, c.omega);
    if (tr.system != System::transformed) throw PreconditionError("integral identities need log coordinates");
    const std::size_t n = tr.size() - 1;
    if (n % 2 != 0) throw PreconditionError("integral identities need an even number of intervals");
    const double h = c.omega / static_cast<double>(n);
    for (std::size_t i = 0; i <= n; ++i) {
        if (std::abs(tr.times[i] - static_cast<double>(i) * h) > 1e-9 * c.omega) {
            throw PreconditionError("integral identities need uniformly sampled output");
        }
    }

    std::array<std::vector<double>, 12> side;
    for (auto& s : side) s.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = tr.times[k];
        const double x1 = tr.states[k][0], x2 = tr.states[k][1], x3 = tr.states[k][2];
        const double e1 = std::exp(x1), e2 = std::exp(x2), e3 = std::exp(x3);
        const double b = c.b(t), mu1 = c.mu1(t), b1 = c.beta1(t), b2 = c.beta2(t);
        const double g1 = c.gamma1(t), g2 = c.gamma2(t), a1 = c.alpha1(t), a2 = c.alpha2(t);
        const double latent = c.mu2(t) + a1 + g1;
        const double decay = m.decay_a(t);

        side[0][k] = b / e1;
        side[1][k] = mu1 + b1 * e2 + b2 * e3 - g1 * e2 / e1 - g2 * e3 / e1;
        side[2][k] = b1 * e1 + b2 * e1 * e3 / e2 + a2 * e3 / e2;
        side[3][k] = latent;
        side[4][k] = a1 * e2 / e3;
        side[5][k] = decay;

        side[6][k] = b;
        side[7][k] = mu1 * e1 + b1 * e1 * e2 + b2 * e1 * e3 - g1 * e2 - g2 * e3;
        side[8][k] = b1 * e1 * e2 + b2 * e1 * e3 + a2 * e3;
        side[9][k] = latent * e2;
        side[10][k] = a1 * e2;
        side[11][k] = decay * e3;
    }
    std::array<double, 6> out{};
    for (int i = 0; i < 6; ++i) {
        const double lhs = simpson(side[2 * i], h);
        const double rhs = simpson(side[2 * i + 1], h);
        const double scale = std::max(std::abs(lhs), std::abs(rhs));
        out[i] = scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
    }
    return out;
}

/// Integrates the logarithmic system from x0 and the original system from
/// exp(x0) over [0, horizon]; returns max_t max_i |exp(x_i) - y_i| / y_i.
inline double check_equivalence(const Model& m, const LogState& x0, double horizon,
                                const IntegratorConfig& cfg = {}, std::size_t samples_per_period = 64) {
    if (!(horizon >= m.coeffs.omega)) throw PreconditionError("equivalence horizon must be >= omega");
    const auto periods = static_cast<std::size_t>(std::ceil(horizon / m.coeffs.omega - 1e-12));
    const std::size_t n = std::max<std::size_t>(1, periods * samples_per_period);
    const auto tx = integrate_sampled(m, System::transformed, x0.v, 0.0, horizon, n, cfg);
    const auto ty = integrate_sampled(m, System::original, from_log(x0).v, 0.0, horizon, n, cfg);
    double worst = 0.0;
    for (std::size_t k = 0; k < tx.size(); ++k) {
        for (int i = 0; i < 3; ++i) {
            const double y = ty.states[k][i];
            worst = std::max(worst, std::abs(std::exp(tx.states[k][i]) - y) / std::abs(y));
        }
    }
    return worst;
}

enum class Verdict { certified, certified_with_warnings, failed };

inline constexpr std::string_view name_of(Verdict v) {
    switch (v) {
        case Verdict::certified: return "certified";
        case Verdict::certified_with_warnings: return "certified-with-warnings";
        case Verdict::failed: return "failed";
    }
    return "?";
}

struct CertifyConfig {
    double periodicity_tol = 1e-9;
    double box_slack = 1e-9;
    double box_warning_band = 1e-6;
    double equivalence_tol = 1e-6;
    double equivalence_periods = 10.0;
    double identity_rtol_factor = 1e3;  // identity tolerance = factor * integrator rtol
    IntegratorConfig integrator{};
};

struct Certificate {
    PeriodicityCheck periodicity;
    double positivity_min = 0.0;
    bool positivity_ok = false;
    std::optional<BoxCheck> box;
    std::array<double, 6> identity_residuals{};
    double identity_tol = 0.0;
    bool identities_ok = false;
    double equivalence_error = 0.0;
    bool equivalence_ok = false;
    HypothesisReport hypothesis;
    std::optional<AprioriBounds> bounds;
    bool orbit_converged = false;
    Verdict verdict = Verdict::failed;
    std::vector<std::string> failures;
    std::vector<std::string> warnings;
};

/// Runs every check and applies the verdict policy. Hard failures: an
/// unconverged orbit, periodicity, positivity, equivalence, integral
/// identities, an empty box, and box violations beyond the warning band
/// other than the x2 lower bound. Warnings: failed hypothesis, small box
/// violations, and any x2 lower-bound violation.
inline Certificate certify(const Model& m, const PeriodicOrbit& orbit, const HypothesisReport& hyp,
                           const std::optional<AprioriBounds>& bounds, const CertifyConfig& cfg = {}) {
    Certificate cert;
    cert.hypothesis = hyp;
    cert.bounds = bounds;
    cert.orbit_converged = orbit.converged;
    if (!orbit.converged) cert.failures.push_back("orbit did not converge: " + orbit.failure);
    if (!hyp.holds) cert.warnings.push_back("existence hypothesis does not hold");

    if (orbit.trajectory.size() < 2) {
        cert.failures.push_back("orbit has no trajectory");
        return cert;
    }

    cert.periodicity = check_periodicity(m, orbit, cfg.periodicity_tol, cfg.integrator);
    if (!cert.periodicity.pass) cert.failures.push_back("periodicity");

    cert.positivity_min = std::numeric_limits<double>::infinity();
    for (const auto& x : orbit.trajectory.states) {
        cert.positivity_min = std::min(cert.positivity_min, from_log(LogState(x)).v.minCoeff());
    }
    cert.positivity_ok = cert.positivity_min > 0.0 && std::isfinite(cert.positivity_min);
    if (!cert.positivity_ok) cert.failures.push_back("positivity");

    cert.identity_residuals = check_integral_identities(m, orbit);
    cert.identity_tol = cfg.identity_rtol_factor * cfg.integrator.rtol;
    cert.identities_ok = std::all_of(cert.identity_residuals.begin(), cert.identity_residuals.end(),
                                     [&](double r) { return r < cert.identity_tol; });
    if (!cert.identities_ok) cert.failures.push_back("integral identities");

    cert.equivalence_error =
        check_equivalence(m, orbit.x0, cfg.equivalence_periods * m.coeffs.omega, cfg.integrator);
    cert.equivalence_ok = cert.equivalence_error < cfg.equivalence_tol;
    if (!cert.equivalence_ok) cert.failures.push_back("equivalence");

    if (bounds) {
        cert.box = check_box(orbit, *bounds, cfg.box_slack);
        if (cert.box->inconsistent) {
            cert.failures.push_back("a priori box is empty");
        } else {
            static const char* comp[] = {"x1", "x2", "x3"};
            for (int i = 0; i < 3; ++i) {
                const double lo = cert.box->lower_margin[i];
                const double hi = cert.box->upper_margin[i];
                if (!cert.box->lower_ok[i]) {
                    const std::string what = std::string(comp[i]) + " below lower bound by " + std::to_string(-lo);
                    if (i == 1 || lo >= -cfg.box_warning_band) {
                        cert.warnings.push_back(what);
                    } else {
                        cert.failures.push_back(what);
                    }
                }
                if (!cert.box->upper_ok[i]) {
                    const std::string what = std::string(comp[i]) + " above upper bound by " + std::to_string(-hi);
                    if (hi >= -cfg.box_warning_band) {
                        cert.warnings.push_back(what);
                    } else {
                        cert.failures.push_back(what);
                    }
                }
            }
        }
    }

    if (!cert.failures.empty()) {
        cert.verdict = Verdict::failed;
    } else if (!cert.warnings.empty()) {
        cert.verdict = Verdict::certified_with_warnings;
    } else {
        cert.verdict = Verdict::certified;
    }
    return cert;
}

}  // namespace virusperiod
