#pragma once

// JSON and CSV serialization of reports, orbits and trajectories.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "virusperiod/bounds.hpp"
#include "virusperiod/certify.hpp"
#include "virusperiod/config.hpp"
#include "virusperiod/integrate.hpp"
#include "virusperiod/solver.hpp"

namespace virusperiod {

inline constexpr const char* kToolVersion = "1.0.0";

inline std::string to_string(D1Variant v) { return v == D1Variant::derivation ? "derivation" : "literal"; }
inline std::string to_string(ADecay v) { return v == ADecay::alpha2 ? "alpha2" : "alpha1"; }

/// True when the alpha1 and alpha2 decay conventions give different systems.
inline bool a_decay_variants_disagree(const CoefficientSet& c, std::size_t grid_n = kDefaultGridN) {
    const Range r = extrema([&](double t) { return c.alpha1(t) - c.alpha2(t); }, c.omega, grid_n);
    return r.min != 0.0 || r.max != 0.0;
}

/// Fields every JSON document carries.
inline json report_header(const RunConfig& cfg, const std::string& command) {
    return json{{"tool", "virusperiod"},
                {"version", kToolVersion},
                {"command", command},
                {"config_hash", config_hash(cfg.raw)},
                {"d1_variant", to_string(cfg.d1_variant)},
                {"a_decay", to_string(cfg.a_decay)},
                {"a_decay_variants_disagree", a_decay_variants_disagree(cfg.coeffs, cfg.grid_n)}};
}

inline json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

template <std::size_t N>
json array_json(const std::array<double, N>& a) {
    json j = json::array();
    for (double v : a) j.push_back(v);
    return j;
}

inline json to_json(const HypothesisReport& r) {
    json violations = json::array();
    for (const auto& v : r.violations) {
        violations.push_back({{"coefficient", std::string(name_of(v.coef))}, {"min", v.min_value}});
    }
    return json{{"lhs_max", r.lhs_max},
                {"rhs_min", r.rhs_min},
                {"positivity_ok", r.positivity_ok},
                {"holds", r.holds},
                {"theta", r.theta ? json(*r.theta) : json(nullptr)},
                {"positivity_violations", violations}};
}

inline json to_json(const AprioriBounds& b) {
    json empty = json::array();
    for (int i : b.empty_components()) empty.push_back(i + 1);
    return json{{"theta", b.theta},
                {"rho", array_json(b.rho)},
                {"d", array_json(b.d)},
                {"delta", array_json(b.delta)},
                {"log_lower", array_json(b.log_lower)},
                {"log_upper", array_json(b.log_upper)},
                {"ball_radius", b.ball_radius},
                {"d1_variant", to_string(b.d1_variant)},
                {"consistent", b.consistent()},
                {"empty_components", empty}};
}

inline json to_json(const Multipliers& mu) {
    json j = json::array();
    for (const auto& z : mu) j.push_back({{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}});
    return j;
}

inline json to_json(const PeriodicOrbit& o) {
    json m = json::array();
    for (int i = 0; i < 3; ++i) m.push_back(vec_json(o.monodromy.row(i).transpose()));
    return json{{"converged", o.converged},
                {"x0", vec_json(o.x0.v)},
                {"y0", vec_json(from_log(o.x0).v)},
                {"residual", o.residual},
                {"residual_sum", o.residual_sum},
                {"newton_iterations", o.iterations},
                {"poincare_iterations", o.poincare_iterations},
                {"residual_history", o.residual_history},
                {"monodromy", m},
                {"floquet_multipliers", to_json(o.floquet_multipliers)},
                {"failure", o.failure.empty() ? json(nullptr) : json(o.failure)}};
}

inline json to_json(const BoxCheck& b) {
    return json{{"inconsistent", b.inconsistent},
                {"lower_margin", array_json(b.lower_margin)},
                {"upper_margin", array_json(b.upper_margin)},
                {"pass", b.pass()}};
}

inline json to_json(const Certificate& c) {
    return json{{"verdict", std::string(name_of(c.verdict))},
                {"orbit_converged", c.orbit_converged},
                {"periodicity",
                 {{"residual", c.periodicity.residual},
                  {"spot_check", c.periodicity.spot_check},
                  {"pass", c.periodicity.pass}}},
                {"positivity", {{"min", c.positivity_min}, {"pass", c.positivity_ok}}},
                {"box", c.box ? to_json(*c.box) : json(nullptr)},
                {"integral_identities",
                 {{"residuals", array_json(c.identity_residuals)},
                  {"tolerance", c.identity_tol},
                  {"pass", c.identities_ok}}},
                {"equivalence", {{"max_relative_error", c.equivalence_error}, {"pass", c.equivalence_ok}}},
                {"hypothesis", to_json(c.hypothesis)},
                {"bounds", c.bounds ? to_json(*c.bounds) : json(nullptr)},
                {"failures", c.failures},
                {"warnings", c.warnings}};
}

/// Columns t,S,L,A,x1,x2,x3; both coordinate systems whichever was integrated.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << "t,S,L,A,x1,x2,x3\n";
    char buf[64];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf << sep;
    };
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const Vec3& s = tr.states[k];
        const Vec3 y = tr.system == System::original ? s : Vec3(s.array().exp().matrix());
        Vec3 x;
        for (int i = 0; i < 3; ++i) x[i] = tr.system == System::transformed ? s[i] : std::log(s[i]);
        put(tr.times[k], ',');
        put(y[0], ',');
        put(y[1], ',');
        put(y[2], ',');
        put(x[0], ',');
        put(x[1], ',');
        put(x[2], '\n');
    }
}

}  // namespace virusperiod
