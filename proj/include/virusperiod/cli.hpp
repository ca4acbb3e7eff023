#pragma once

// Command implementations behind the virusperiod executable. Each command
// writes its JSON document to `out`, diagnostics to `err`, and returns the
// process exit code.

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "virusperiod/virusperiod.hpp"

namespace virusperiod::cli {

enum Exit : int {
    kOk = 0,
    kConfigError = 2,
    kPositivity = 3,
    kHypothesis = 4,
    kBoundsInconsistent = 5,
    kNoConvergence = 6,
    kCertificationFailed = 7,
};

struct Options {
    std::string command;
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::string> d1_variant;
    std::optional<std::string> a_decay;
    std::optional<std::size_t> grid_n;
    std::size_t multi_start = 0;
    std::optional<std::vector<double>> y0;
    std::optional<double> t1;
    std::optional<std::string> system;
};

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> names = {"validate", "hypothesis", "bounds", "simulate",
                                                   "find-periodic", "certify", "sweep"};
    return names;
}

namespace detail {

inline RunConfig load(const Options& opt) {
    RunConfig cfg = load_config(opt.config_path);
    if (opt.d1_variant) cfg.d1_variant = parse_d1_variant(*opt.d1_variant);
    if (opt.a_decay) cfg.a_decay = parse_a_decay(*opt.a_decay);
    if (opt.grid_n) {
        if (*opt.grid_n < 64) throw ConfigError("--grid-n: must be >= 64");
        cfg.grid_n = *opt.grid_n;
    }
    if (opt.y0) {
        if (opt.y0->size() != 3) throw ConfigError("--y0: expected S,L,A");
        cfg.simulate.y0 = Vec3((*opt.y0)[0], (*opt.y0)[1], (*opt.y0)[2]);
    }
    if (opt.t1) cfg.simulate.t1 = *opt.t1;
    if (opt.system) {
        if (*opt.system == "original") {
            cfg.simulate.system = System::original;
        } else if (*opt.system == "transformed") {
            cfg.simulate.system = System::transformed;
        } else {
            throw ConfigError("--system: expected original or transformed");
        }
    }
    return cfg;
}

inline void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path().empty() ? "." : p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write " + p.string());
    f << text;
}

inline void write_csv(const std::filesystem::path& p, const Trajectory& tr) {
    std::ostringstream os;
    write_trajectory_csv(os, tr);
    write_file(p, os.str());
}

inline std::optional<AprioriBounds> bounds_if_holds(const RunConfig& cfg, const HypothesisReport& hyp) {
    if (!hyp.holds) return std::nullopt;
    try {
        return compute_bounds(cfg.coeffs, cfg.d1_variant, cfg.grid_n);
    } catch (const HypothesisError&) {
        return std::nullopt;
    }
}

inline json violations_json(const std::vector<PositivityViolation>& v) {
    json arr = json::array();
    for (const auto& x : v) arr.push_back({{"coefficient", std::string(name_of(x.coef))}, {"min", x.min_value}});
    return arr;
}

inline int positivity_gate(const RunConfig& cfg, const std::string& command, std::ostream& out,
                           std::ostream& err) {
    const auto v = positivity_violations(cfg.coeffs, cfg.grid_n);
    if (v.empty()) return kOk;
    json j = report_header(cfg, command);
    j["valid"] = false;
    j["positivity_violations"] = violations_json(v);
    emit(out, j);
    for (const auto& x : v) {
        err << "coefficient " << name_of(x.coef) << " is not positive (min " << x.min_value << ")\n";
    }
    return kPositivity;
}

inline int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (int rc = positivity_gate(cfg, "validate", out, err)) return rc;
    json j = report_header(cfg, "validate");
    j["valid"] = true;
    j["omega"] = cfg.coeffs.omega;
    j["positivity_violations"] = json::array();
    emit(out, j);
    return kOk;
}

inline int cmd_hypothesis(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (int rc = positivity_gate(cfg, "hypothesis", out, err)) return rc;
    const auto hyp = check_hypothesis(cfg.coeffs, cfg.grid_n);
    json j = report_header(cfg, "hypothesis");
    j["hypothesis"] = to_json(hyp);
    emit(out, j);
    return hyp.holds ? kOk : kHypothesis;
}

inline int cmd_bounds(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (int rc = positivity_gate(cfg, "bounds", out, err)) return rc;
    const auto hyp = check_hypothesis(cfg.coeffs, cfg.grid_n);
    json j = report_header(cfg, "bounds");
    j["hypothesis"] = to_json(hyp);
    const auto bounds = bounds_if_holds(cfg, hyp);
    if (!bounds) {
        j["bounds"] = nullptr;
        emit(out, j);
        err << "existence hypothesis does not hold; bounds are undefined\n";
        return kHypothesis;
    }
    j["bounds"] = to_json(*bounds);
    if (!bounds->consistent()) {
        json inc = json::array();
        for (int i : bounds->empty_components()) {
            inc.push_back({{"component", i + 1},
                           {"log_lower", bounds->log_lower[i]},
                           {"log_upper", bounds->log_upper[i]}});
        }
        j["inconsistency"] = inc;
        emit(out, j);
        err << "a priori box is empty\n";
        return kBoundsInconsistent;
    }
    emit(out, j);
    return kOk;
}

inline int cmd_simulate(const RunConfig& cfg, const Options& opt, std::ostream& out, std::ostream&) {
    if (!cfg.simulate.y0) throw ConfigError("simulate.y0: missing (config or --y0)");
    if (!cfg.simulate.t1) throw ConfigError("simulate.t1: missing (config or --t1)");
    const System sys = cfg.simulate.system;
    const Model m = cfg.model();
    const Vec3 y0 = sys == System::original ? *cfg.simulate.y0 : to_log(State(*cfg.simulate.y0)).v;
    const auto tr = integrate(m, sys, y0, 0.0, *cfg.simulate.t1, cfg.integrator);

    const std::filesystem::path dir(opt.out_dir);
    write_csv(dir / "trajectory.csv", tr);
    const Vec3& last = tr.states.back();
    const Vec3 y_last = sys == System::original ? last : from_log(LogState(last)).v;
    json j = report_header(cfg, "simulate");
    j["system"] = sys == System::original ? "original" : "transformed";
    j["steps"] = tr.size() - 1;
    j["t_final"] = tr.times.back();
    j["final_state"] = vec_json(y_last);
    j["trajectory_csv"] = (dir / "trajectory.csv").string();
    write_file(dir / "summary.json", j.dump(2) + "\n");
    emit(out, j);
    return kOk;
}

struct Solved {
    HypothesisReport hyp;
    std::optional<AprioriBounds> bounds;
    PeriodicOrbit orbit;
    std::optional<MultiStartResult> multi;
};

inline Solved solve(const RunConfig& cfg, std::size_t multi_start_n) {
    Solved s;
    const Model m = cfg.model();
    s.hyp = check_hypothesis(cfg.coeffs, cfg.grid_n);
    s.bounds = bounds_if_holds(cfg, s.hyp);
    s.orbit = shoot(m, initial_guess(m, s.bounds), cfg.shooting);
    if (multi_start_n > 0) {
        s.multi = multi_start(m, s.bounds, multi_start_n, cfg.shooting, thread_cap());
        if (!s.orbit.converged && !s.multi->distinct.empty()) s.orbit = s.multi->distinct.front();
    }
    return s;
}

inline json multi_json(const MultiStartResult& r) {
    json arr = json::array();
    for (const auto& o : r.distinct) arr.push_back(to_json(o));
    return json{{"starts", r.starts}, {"converged", r.converged}, {"distinct_orbits", arr}};
}

inline int cmd_find_periodic(const RunConfig& cfg, const Options& opt, std::ostream& out, std::ostream& err) {
    if (int rc = positivity_gate(cfg, "find-periodic", out, err)) return rc;
    const Solved s = solve(cfg, opt.multi_start);
    json j = report_header(cfg, "find-periodic");
    j["hypothesis"] = to_json(s.hyp);
    j["orbit"] = to_json(s.orbit);
    if (s.multi) j["multi_start"] = multi_json(*s.multi);
    const std::filesystem::path dir(opt.out_dir);
    if (!s.orbit.trajectory.empty()) {
        write_csv(dir / "orbit.csv", s.orbit.trajectory);
        j["orbit_csv"] = (dir / "orbit.csv").string();
    }
    write_file(dir / "orbit.json", j.dump(2) + "\n");
    emit(out, j);
    if (!s.orbit.converged) err << "shooting did not converge: " << s.orbit.failure << '\n';
    return s.orbit.converged ? kOk : kNoConvergence;
}

inline int cmd_certify(const RunConfig& cfg, const Options& opt, std::ostream& out, std::ostream& err) {
    if (int rc = positivity_gate(cfg, "certify", out, err)) return rc;
    const Solved s = solve(cfg, opt.multi_start);
    CertifyConfig cc;
    cc.integrator = cfg.integrator;
    const Certificate cert = certify(cfg.model(), s.orbit, s.hyp, s.bounds, cc);
    json j = report_header(cfg, "certify");
    j["certificate"] = to_json(cert);
    j["orbit"] = to_json(s.orbit);
    if (s.multi) j["multi_start"] = multi_json(*s.multi);
    emit(out, j);
    for (const auto& f : cert.failures) err << "failure: " << f << '\n';
    for (const auto& w : cert.warnings) err << "warning: " << w << '\n';
    if (!s.hyp.holds) return kHypothesis;
    if (s.bounds && !s.bounds->consistent()) return kBoundsInconsistent;
    if (!s.orbit.converged) return kNoConvergence;
    if (cert.verdict == Verdict::failed) return kCertificationFailed;
    return kOk;
}

inline json sweep_record(const RunConfig& base, Coef param, std::size_t index, double value) {
    RunConfig cfg = base;
    cfg.coeffs.get(param) = PeriodicFn::constant(cfg.coeffs.omega, value);
    json rec{{"index", index}, {"parameter", std::string(name_of(param))}, {"value", value}};
    const auto v = positivity_violations(cfg.coeffs, cfg.grid_n);
    if (!v.empty()) {
        rec["status"] = "positivity";
        rec["positivity_violations"] = violations_json(v);
        return rec;
    }
    const Solved s = solve(cfg, 0);
    rec["hypothesis"] = to_json(s.hyp);
    rec["bounds"] = s.bounds ? to_json(*s.bounds) : json(nullptr);
    rec["orbit"] = {{"converged", s.orbit.converged},
                    {"residual", s.orbit.residual},
                    {"x0", vec_json(s.orbit.x0.v)},
                    {"y0", vec_json(from_log(s.orbit.x0).v)},
                    {"floquet_multipliers", to_json(s.orbit.floquet_multipliers)}};
    rec["status"] = !s.hyp.holds                               ? "hypothesis"
                    : (s.bounds && !s.bounds->consistent()) ? "bounds-inconsistent"
                    : !s.orbit.converged                     ? "no-convergence"
                                                             : "ok";
    return rec;
}

inline int cmd_sweep(const RunConfig& cfg, const Options& opt, std::ostream& out, std::ostream&) {
    if (!cfg.sweep || cfg.sweep->values.empty()) throw ConfigError("sweep.values: empty parameter grid");
    const auto& sw = *cfg.sweep;
    const auto records = parallel_map<json>(sw.values.size(), thread_cap(), [&](std::size_t i) {
        return sweep_record(cfg, sw.parameter, i, sw.values[i]);
    });
    const json header = report_header(cfg, "sweep");
    std::ostringstream lines;
    for (auto rec : records) {
        rec["config_hash"] = header["config_hash"];
        rec["version"] = header["version"];
        rec["d1_variant"] = header["d1_variant"];
        rec["a_decay"] = header["a_decay"];
        lines << rec.dump() << '\n';
    }
    out << lines.str();
    if (opt.out_dir != ".") write_file(std::filesystem::path(opt.out_dir) / "sweep.jsonl", lines.str());
    return kOk;
}

}  // namespace detail

/// Dispatches one command. Never throws; errors become exit codes.
inline int run(const Options& opt, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = detail::load(opt);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    try {
        if (opt.command == "validate") return detail::cmd_validate(cfg, out, err);
        if (opt.command == "hypothesis") return detail::cmd_hypothesis(cfg, out, err);
        if (opt.command == "bounds") return detail::cmd_bounds(cfg, out, err);
        if (opt.command == "simulate") return detail::cmd_simulate(cfg, opt, out, err);
        if (opt.command == "find-periodic") return detail::cmd_find_periodic(cfg, opt, out, err);
        if (opt.command == "certify") return detail::cmd_certify(cfg, opt, out, err);
        if (opt.command == "sweep") return detail::cmd_sweep(cfg, opt, out, err);
        err << "unknown command '" << opt.command << "'\n";
        return kConfigError;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNoConvergence;
    }
}

}  // namespace virusperiod::cli
