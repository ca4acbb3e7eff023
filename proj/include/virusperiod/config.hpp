#pragma once

// JSON run configuration: coefficients, integrator and shooting settings,
// variants, and command options. One document reproduces one run.
//
//   {
//     "omega": 1.0,
//     "coefficients": {
//       "b":      {"form": "fourier", "c0": 1.0, "harmonics": [[0.0, 0.5]]},
//       "mu1":    0.1,
//       "gamma2": {"form": "table", "values": [0.3, 0.31, 0.29]},
//       ...
//     },
//     "integrator": {"method": "rk45", "rtol": 1e-9, "atol": 1e-11, "h": 0.01, "max_steps": 1000000},
//     "shooting":   {"max_newton_iters": 50, "residual_tol": 1e-10, "fallback_poincare_iters": 200, "samples": 256},
//     "d1_variant": "derivation", "a_decay": "alpha2", "grid_n": 2048,
//     "simulate":   {"y0": [10, 1, 1], "t1": 10, "system": "original"},
//     "sweep":      {"parameter": "b", "values": [0.5, 1.0, 1.5]}
//   }

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "virusperiod/bounds.hpp"
#include "virusperiod/errors.hpp"
#include "virusperiod/integrate.hpp"
#include "virusperiod/model.hpp"
#include "virusperiod/periodic_fn.hpp"
#include "virusperiod/solver.hpp"

namespace virusperiod {

using json = nlohmann::json;

/// Malformed or inconsistent configuration; the message names the field.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct SimulateOptions {
    std::optional<Vec3> y0;
    std::optional<double> t1;
    System system = System::original;
};

struct SweepOptions {
    Coef parameter = Coef::b;
    std::vector<double> values;
};

struct RunConfig {
    CoefficientSet coeffs;
    IntegratorConfig integrator;
    ShootingConfig shooting;
    D1Variant d1_variant = D1Variant::derivation;
    ADecay a_decay = ADecay::alpha2;
    std::size_t grid_n = kDefaultGridN;
    SimulateOptions simulate;
    std::optional<SweepOptions> sweep;
    json raw;

    Model model() const { return Model{coeffs, a_decay}; }
};

/// FNV-1a 64-bit hash of the canonical (key-sorted, compact) JSON dump.
inline std::string config_hash(const json& j) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : j.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace detail {

inline double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path + ": must be finite");
    return v;
}

inline std::optional<double> optional_number(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    return number_at(obj.at(key), path + "." + key);
}

inline std::size_t count_at(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw ConfigError(path + ": expected a non-negative integer");
    }
    return j.get<std::size_t>();
}

inline std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj.at(key).is_string()) throw ConfigError(path + "." + key + ": expected a string");
    return obj.at(key).get<std::string>();
}

inline void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

inline PeriodicFn parse_coefficient(const json& j, double omega, const std::string& path) {
    if (j.is_number()) return PeriodicFn::constant(omega, number_at(j, path));
    require_object(j, path);
    double own_omega = omega;
    if (auto w = optional_number(j, "omega", path)) {
        own_omega = *w;
        if (!(own_omega > 0.0)) throw ConfigError(path + ".omega: must be > 0");
    }
    const std::string form = optional_string(j, "form", path).value_or("fourier");
    if (form == "fourier") {
        const double c0 = optional_number(j, "c0", path).value_or(0.0);
        std::vector<Harmonic> hs;
        if (j.contains("harmonics")) {
            const auto& arr = j.at("harmonics");
            if (!arr.is_array()) throw ConfigError(path + ".harmonics: expected an array of [a, b] pairs");
            for (std::size_t k = 0; k < arr.size(); ++k) {
                const std::string hp = path + ".harmonics[" + std::to_string(k) + "]";
                if (!arr[k].is_array() || arr[k].size() != 2) throw ConfigError(hp + ": expected [a, b]");
                hs.push_back({number_at(arr[k][0], hp + "[0]"), number_at(arr[k][1], hp + "[1]")});
            }
        }
        return PeriodicFn::fourier(own_omega, c0, std::move(hs));
    }
    if (form == "table") {
        if (!j.contains("values") || !j.at("values").is_array()) {
            throw ConfigError(path + ".values: expected an array of samples");
        }
        const auto& arr = j.at("values");
        if (arr.size() < 2) throw ConfigError(path + ".values: need at least 2 samples");
        std::vector<double> vals;
        for (std::size_t k = 0; k < arr.size(); ++k) {
            vals.push_back(number_at(arr[k], path + ".values[" + std::to_string(k) + "]"));
        }
        return PeriodicFn::table(own_omega, std::move(vals));
    }
    throw ConfigError(path + ".form: unknown form '" + form + "' (expected fourier or table)");
}

inline Coef coef_from_name(const std::string& name, const std::string& path) {
    for (Coef k : kAllCoefs) {
        if (name_of(k) == name) return k;
    }
    throw ConfigError(path + ": unknown coefficient '" + name + "'");
}

}  // namespace detail

inline D1Variant parse_d1_variant(const std::string& s) {
    if (s == "derivation") return D1Variant::derivation;
    if (s == "literal") return D1Variant::literal;
    throw ConfigError("d1_variant: expected derivation or literal, got '" + s + "'");
}

inline ADecay parse_a_decay(const std::string& s) {
    if (s == "alpha2") return ADecay::alpha2;
    if (s == "alpha1") return ADecay::alpha1;
    throw ConfigError("a_decay: expected alpha2 or alpha1, got '" + s + "'");
}

inline RunConfig parse_config(const json& root) {
    using namespace detail;
    require_object(root, "<root>");
    RunConfig cfg;
    cfg.raw = root;

    if (!root.contains("omega")) throw ConfigError("omega: missing");
    const double omega = number_at(root.at("omega"), "omega");
    if (!(omega > 0.0)) throw ConfigError("omega: must be > 0");
    cfg.coeffs.omega = omega;

    if (!root.contains("coefficients")) throw ConfigError("coefficients: missing");
    const auto& co = root.at("coefficients");
    require_object(co, "coefficients");
    for (auto it = co.begin(); it != co.end(); ++it) {
        coef_from_name(it.key(), "coefficients." + it.key());
    }
    for (Coef k : kAllCoefs) {
        const std::string key(name_of(k));
        if (!co.contains(key)) throw ConfigError("coefficients." + key + ": missing");
        cfg.coeffs.get(k) = parse_coefficient(co.at(key), omega, "coefficients." + key);
    }
    if (const auto bad = cfg.coeffs.period_mismatches(); !bad.empty()) {
        throw ConfigError("coefficients." + bad.front() + ".omega: period differs from the shared omega");
    }

    if (root.contains("integrator")) {
        const auto& ij = root.at("integrator");
        require_object(ij, "integrator");
        if (auto m = optional_string(ij, "method", "integrator")) {
            if (*m == "rk4") {
                cfg.integrator.method = Method::rk4;
            } else if (*m == "rk45") {
                cfg.integrator.method = Method::rk45;
            } else {
                throw ConfigError("integrator.method: expected rk4 or rk45, got '" + *m + "'");
            }
        }
        if (auto v = optional_number(ij, "h", "integrator")) cfg.integrator.h = *v;
        if (auto v = optional_number(ij, "rtol", "integrator")) cfg.integrator.rtol = *v;
        if (auto v = optional_number(ij, "atol", "integrator")) cfg.integrator.atol = *v;
        if (ij.contains("max_steps")) cfg.integrator.max_steps = count_at(ij.at("max_steps"), "integrator.max_steps");
        try {
            cfg.integrator.validate();
        } catch (const PreconditionError& e) {
            throw ConfigError(std::string("integrator: ") + e.what());
        }
    }
    cfg.shooting.integrator = cfg.integrator;

    if (root.contains("shooting")) {
        const auto& sj = root.at("shooting");
        require_object(sj, "shooting");
        if (sj.contains("max_newton_iters")) {
            cfg.shooting.max_newton_iters = count_at(sj.at("max_newton_iters"), "shooting.max_newton_iters");
        }
        if (auto v = optional_number(sj, "residual_tol", "shooting")) cfg.shooting.residual_tol = *v;
        if (sj.contains("fallback_poincare_iters")) {
            cfg.shooting.fallback_poincare_iters =
                count_at(sj.at("fallback_poincare_iters"), "shooting.fallback_poincare_iters");
        }
        if (sj.contains("samples")) cfg.shooting.samples = count_at(sj.at("samples"), "shooting.samples");
        try {
            cfg.shooting.validate();
        } catch (const PreconditionError& e) {
            throw ConfigError(std::string("shooting: ") + e.what());
        }
    }

    if (auto s = optional_string(root, "d1_variant", "")) cfg.d1_variant = parse_d1_variant(*s);
    if (auto s = optional_string(root, "a_decay", "")) cfg.a_decay = parse_a_decay(*s);
    if (root.contains("grid_n")) {
        cfg.grid_n = count_at(root.at("grid_n"), "grid_n");
        if (cfg.grid_n < 64) throw ConfigError("grid_n: must be >= 64");
    }

    if (root.contains("simulate")) {
        const auto& sj = root.at("simulate");
        require_object(sj, "simulate");
        if (sj.contains("y0")) {
            const auto& y = sj.at("y0");
            if (!y.is_array() || y.size() != 3) throw ConfigError("simulate.y0: expected [S, L, A]");
            cfg.simulate.y0 = Vec3(number_at(y[0], "simulate.y0[0]"), number_at(y[1], "simulate.y0[1]"),
                                   number_at(y[2], "simulate.y0[2]"));
        }
        cfg.simulate.t1 = optional_number(sj, "t1", "simulate");
        if (auto s = optional_string(sj, "system", "simulate")) {
            if (*s == "original") {
                cfg.simulate.system = System::original;
            } else if (*s == "transformed") {
                cfg.simulate.system = System::transformed;
            } else {
                throw ConfigError("simulate.system: expected original or transformed");
            }
        }
    }

    if (root.contains("sweep")) {
        const auto& sj = root.at("sweep");
        require_object(sj, "sweep");
        SweepOptions sw;
        sw.parameter = coef_from_name(optional_string(sj, "parameter", "sweep").value_or("b"), "sweep.parameter");
        if (!sj.contains("values") || !sj.at("values").is_array()) {
            throw ConfigError("sweep.values: expected an array of numbers");
        }
        const auto& arr = sj.at("values");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            sw.values.push_back(number_at(arr[k], "sweep.values[" + std::to_string(k) + "]"));
        }
        cfg.sweep = std::move(sw);
    }
    return cfg;
}

/// Reads and parses a config file. Syntax errors carry the parser's
/// line/column; schema errors carry the dotted field path.
inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(j);
}

}  // namespace virusperiod
