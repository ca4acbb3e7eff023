#pragma once

// Positive, omega-periodic scalar coefficients and the ten-coefficient set of
// the nonresident virus model.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "virusperiod/errors.hpp"

namespace virusperiod {

inline constexpr std::size_t kDefaultGridN = 2048;
inline constexpr double kGoldenTol = 1e-10;

struct Harmonic {
    double cos_coeff = 0.0;
    double sin_coeff = 0.0;
};

struct Range {
    double min = 0.0;
    double max = 0.0;
};

/// An omega-periodic scalar function, stored either as a truncated Fourier
/// series c0 + sum_k a_k cos(2 pi k t / omega) + b_k sin(2 pi k t / omega)
/// or as N uniform samples over [0, omega) with periodic linear interpolation.
class PeriodicFn {
public:
    struct Fourier {
        double c0 = 0.0;
        std::vector<Harmonic> harmonics;
    };
    struct Table {
        std::vector<double> values;
    };

    PeriodicFn() : PeriodicFn(1.0, Fourier{}) {}

    static PeriodicFn constant(double omega, double value) {
        return PeriodicFn(omega, Fourier{value, {}});
    }

    static PeriodicFn fourier(double omega, double c0, std::vector<Harmonic> harmonics = {}) {
        return PeriodicFn(omega, Fourier{c0, std::move(harmonics)});
    }

    static PeriodicFn table(double omega, std::vector<double> values) {
        if (values.size() < 2) {
            throw PreconditionError("table form needs at least 2 samples");
        }
        return PeriodicFn(omega, Table{std::move(values)});
    }

    double period() const noexcept { return omega_; }
    bool is_fourier() const noexcept { return std::holds_alternative<Fourier>(rep_); }
    const Fourier* as_fourier() const noexcept { return std::get_if<Fourier>(&rep_); }
    const Table* as_table() const noexcept { return std::get_if<Table>(&rep_); }

    /// Phase of t in [0, omega).
    double reduce(double t) const noexcept {
        double tau = std::fmod(t, omega_);
        if (tau < 0.0) tau += omega_;
        if (tau >= omega_) tau = 0.0;
        return tau;
    }

    double operator()(double t) const noexcept {
        const double tau = reduce(t);
        if (const auto* f = as_fourier()) {
            double v = f->c0;
            const double w = 2.0 * std::numbers::pi * tau / omega_;
            for (std::size_t k = 0; k < f->harmonics.size(); ++k) {
                const double arg = static_cast<double>(k + 1) * w;
                v += f->harmonics[k].cos_coeff * std::cos(arg) + f->harmonics[k].sin_coeff * std::sin(arg);
            }
            return v;
        }
        const auto& s = as_table()->values;
        const std::size_t n = s.size();
        const double u = tau / omega_ * static_cast<double>(n);
        const auto i = std::min(static_cast<std::size_t>(u), n - 1);
        const double frac = u - static_cast<double>(i);
        return s[i] * (1.0 - frac) + s[(i + 1) % n] * frac;
    }

    /// Period mean. Exact for both forms: the trapezoid rule integrates the
    /// periodic piecewise-linear interpolant without error.
    double mean() const noexcept {
        if (const auto* f = as_fourier()) return f->c0;
        const auto& s = as_table()->values;
        double acc = 0.0;
        for (double v : s) acc += v;
        return acc / static_cast<double>(s.size());
    }

private:
    PeriodicFn(double omega, std::variant<Fourier, Table> rep) : omega_(omega), rep_(std::move(rep)) {
        if (!(omega > 0.0) || !std::isfinite(omega)) {
            throw PreconditionError("period must be positive and finite");
        }
    }

    double omega_;
    std::variant<Fourier, Table> rep_;
};

namespace detail {

template <class F>
double golden_section(F&& f, double a, double b, bool maximize, double tol) {
    constexpr double invphi = 0.6180339887498949;
    const double sign = maximize ? -1.0 : 1.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = sign * f(c);
    double fd = sign * f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = sign * f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = sign * f(d);
        }
    }
    return sign * std::min(fc, fd);
}

}  // namespace detail

/// Extrema of an omega-periodic callable: uniform grid of grid_n points,
/// then golden-section refinement inside the two neighbouring cells of every
/// grid-local extremum.
template <class F>
Range extrema(F&& f, double omega, std::size_t grid_n = kDefaultGridN) {
    if (grid_n < 64) throw PreconditionError("grid_n must be >= 64");
    const double h = omega / static_cast<double>(grid_n);
    std::vector<double> v(grid_n);
    for (std::size_t i = 0; i < grid_n; ++i) v[i] = f(static_cast<double>(i) * h);

    const auto lo_it = std::min_element(v.begin(), v.end());
    const auto hi_it = std::max_element(v.begin(), v.end());
    Range r{*lo_it, *hi_it};
    const auto i_lo = static_cast<std::size_t>(lo_it - v.begin());
    const auto i_hi = static_cast<std::size_t>(hi_it - v.begin());

    for (std::size_t i = 0; i < grid_n; ++i) {
        const double prev = v[(i + grid_n - 1) % grid_n];
        const double next = v[(i + 1) % grid_n];
        const double a = (static_cast<double>(i) - 1.0) * h;
        const double b = (static_cast<double>(i) + 1.0) * h;
        if ((v[i] < prev && v[i] <= next) || i == i_lo) {
            r.min = std::min(r.min, detail::golden_section(f, a, b, false, kGoldenTol));
        }
        if ((v[i] > prev && v[i] >= next) || i == i_hi) {
            r.max = std::max(r.max, detail::golden_section(f, a, b, true, kGoldenTol));
        }
    }
    return r;
}

/// f-bottom and f-top. Table form is exact: a piecewise-linear interpolant
/// attains its extrema at the nodes.
inline Range min_max(const PeriodicFn& f, std::size_t grid_n = kDefaultGridN) {
    if (grid_n < 64) throw PreconditionError("grid_n must be >= 64");
    if (const auto* t = f.as_table()) {
        const auto [lo, hi] = std::minmax_element(t->values.begin(), t->values.end());
        return {*lo, *hi};
    }
    return extrema(f, f.period(), grid_n);
}

inline double mean(const PeriodicFn& f) { return f.mean(); }

enum class Coef { b, mu1, mu2, mu3, beta1, beta2, gamma1, gamma2, alpha1, alpha2 };

inline constexpr std::array<Coef, 10> kAllCoefs = {Coef::b,      Coef::mu1,    Coef::mu2,    Coef::mu3,
                                                   Coef::beta1,  Coef::beta2,  Coef::gamma1, Coef::gamma2,
                                                   Coef::alpha1, Coef::alpha2};

inline constexpr std::string_view name_of(Coef c) {
    switch (c) {
        case Coef::b: return "b";
        case Coef::mu1: return "mu1";
        case Coef::mu2: return "mu2";
        case Coef::mu3: return "mu3";
        case Coef::beta1: return "beta1";
        case Coef::beta2: return "beta2";
        case Coef::gamma1: return "gamma1";
        case Coef::gamma2: return "gamma2";
        case Coef::alpha1: return "alpha1";
        case Coef::alpha2: return "alpha2";
    }
    return "?";
}

/// The ten rate functions of the model sharing one period omega.
struct CoefficientSet {
    double omega = 1.0;
    PeriodicFn b, mu1, mu2, mu3, beta1, beta2, gamma1, gamma2, alpha1, alpha2;

    const PeriodicFn& get(Coef c) const noexcept {
        switch (c) {
            case Coef::b: return b;
            case Coef::mu1: return mu1;
            case Coef::mu2: return mu2;
            case Coef::mu3: return mu3;
            case Coef::beta1: return beta1;
            case Coef::beta2: return beta2;
            case Coef::gamma1: return gamma1;
            case Coef::gamma2: return gamma2;
            case Coef::alpha1: return alpha1;
            case Coef::alpha2: return alpha2;
        }
        return b;
    }

    PeriodicFn& get(Coef c) noexcept {
        return const_cast<PeriodicFn&>(std::as_const(*this).get(c));
    }

    /// All-constant set; argument order follows Coef.
    static CoefficientSet constants(double omega, double b, double mu1, double mu2, double mu3, double beta1,
                                    double beta2, double gamma1, double gamma2, double alpha1, double alpha2) {
        CoefficientSet c;
        c.omega = omega;
        const std::array<double, 10> vals = {b, mu1, mu2, mu3, beta1, beta2, gamma1, gamma2, alpha1, alpha2};
        for (std::size_t i = 0; i < kAllCoefs.size(); ++i) {
            c.get(kAllCoefs[i]) = PeriodicFn::constant(omega, vals[i]);
        }
        return c;
    }

    /// Same set with every function replaced by its period mean.
    CoefficientSet averaged() const {
        CoefficientSet c;
        c.omega = omega;
        for (Coef k : kAllCoefs) c.get(k) = PeriodicFn::constant(omega, get(k).mean());
        return c;
    }

    /// Names of coefficients whose period differs from omega.
    std::vector<std::string> period_mismatches() const {
        std::vector<std::string> out;
        for (Coef k : kAllCoefs) {
            if (get(k).period() != omega) out.emplace_back(name_of(k));
        }
        return out;
    }
};

struct PositivityViolation {
    Coef coef;
    double min_value;
};

/// Coefficients whose grid minimum is not strictly positive.
inline std::vector<PositivityViolation> positivity_violations(const CoefficientSet& c,
                                                              std::size_t grid_n = kDefaultGridN) {
    std::vector<PositivityViolation> out;
    for (Coef k : kAllCoefs) {
        const double lo = min_max(c.get(k), grid_n).min;
        if (!(lo > 0.0)) out.push_back({k, lo});
    }
    return out;
}

/// Compound expressions needed by the hypothesis and the a priori bounds.
enum class Expr {
    HypothesisLhs,  // alpha1 (alpha2 + gamma2) / (alpha1 + mu2)
    ADecay,         // mu3 + alpha2 + gamma2
    LatentLoss,     // mu2 + alpha1 + gamma1
    Alpha1Share,    // alpha1 / (alpha1 + mu2)
    Alpha2Gamma2,   // alpha2 + gamma2
    Mu2Alpha1,      // mu2 + alpha1
};

inline constexpr std::string_view name_of(Expr e) {
    switch (e) {
        case Expr::HypothesisLhs: return "alpha1*(alpha2+gamma2)/(alpha1+mu2)";
        case Expr::ADecay: return "mu3+alpha2+gamma2";
        case Expr::LatentLoss: return "mu2+alpha1+gamma1";
        case Expr::Alpha1Share: return "alpha1/(alpha1+mu2)";
        case Expr::Alpha2Gamma2: return "alpha2+gamma2";
        case Expr::Mu2Alpha1: return "mu2+alpha1";
    }
    return "?";
}

inline double eval_expr(const CoefficientSet& c, Expr e, double t) {
    switch (e) {
        case Expr::HypothesisLhs: {
            const double a1 = c.alpha1(t);
            return a1 * (c.alpha2(t) + c.gamma2(t)) / (a1 + c.mu2(t));
        }
        case Expr::ADecay: return c.mu3(t) + c.alpha2(t) + c.gamma2(t);
        case Expr::LatentLoss: return c.mu2(t) + c.alpha1(t) + c.gamma1(t);
        case Expr::Alpha1Share: {
            const double a1 = c.alpha1(t);
            return a1 / (a1 + c.mu2(t));
        }
        case Expr::Alpha2Gamma2: return c.alpha2(t) + c.gamma2(t);
        case Expr::Mu2Alpha1: return c.mu2(t) + c.alpha1(t);
    }
    return 0.0;
}

inline Range min_max_expr(const CoefficientSet& c, Expr e, std::size_t grid_n = kDefaultGridN) {
    const auto g = [&](double t) { return eval_expr(c, e, t); };
    const Range r = extrema(g, c.omega, grid_n);
    if (!std::isfinite(r.min) || !std::isfinite(r.max)) {
        throw PreconditionError("expression " + std::string(name_of(e)) +
                                " is not finite; coefficient positivity is violated");
    }
    return r;
}

}  // namespace virusperiod
