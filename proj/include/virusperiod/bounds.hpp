#pragma once

// Existence hypothesis check and the explicit a priori constants that confine
// every positive periodic solution to a box in logarithmic coordinates.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "virusperiod/errors.hpp"
#include "virusperiod/periodic_fn.hpp"

namespace virusperiod {

struct HypothesisReport {
    double lhs_max = 0.0;  // max alpha1 (alpha2 + gamma2) / (alpha1 + mu2)
    double rhs_min = 0.0;  // min mu3 + alpha2 + gamma2
    bool positivity_ok = false;
    bool holds = false;
    std::optional<double> theta;
    std::vector<PositivityViolation> violations;
};

/// theta = max[alpha1/(alpha1+mu2)] * max(alpha2+gamma2) / min(mu3+alpha2+gamma2).
/// Throws HypothesisError when the result is not in (0, 1).
inline double compute_theta(const CoefficientSet& c, std::size_t grid_n = kDefaultGridN) {
    const double share = min_max_expr(c, Expr::Alpha1Share, grid_n).max;
    const double ag = min_max_expr(c, Expr::Alpha2Gamma2, grid_n).max;
    const double decay = min_max_expr(c, Expr::ADecay, grid_n).min;
    const double theta = share * ag / decay;
    if (!(theta > 0.0 && theta < 1.0)) {
        throw HypothesisError("theta = " + std::to_string(theta) + " is outside (0, 1)");
    }
    return theta;
}

inline HypothesisReport check_hypothesis(const CoefficientSet& c, std::size_t grid_n = kDefaultGridN) {
    HypothesisReport r;
    r.violations = positivity_violations(c, grid_n);
    r.positivity_ok = r.violations.empty() && c.period_mismatches().empty();
    // A zero denominator makes the compound expression meaningless; leave the
    // extrema at zero and report the positivity failure instead.
    try {
        r.lhs_max = min_max_expr(c, Expr::HypothesisLhs, grid_n).max;
        r.rhs_min = min_max_expr(c, Expr::ADecay, grid_n).min;
    } catch (const PreconditionError&) {
        r.positivity_ok = false;
    }
    r.holds = r.positivity_ok && r.lhs_max <= r.rhs_min;
    if (r.holds) r.theta = compute_theta(c, grid_n);
    return r;
}

/// Which pair of constants enters d1: the integral bounds (rho2, rho3) that
/// the estimate chain produces, or the lower bounds (delta2, delta3) as the
/// closed form for d1 is printed.
enum class D1Variant { derivation, literal };

struct AprioriBounds {
    double theta = 0.0;
    std::array<double, 3> rho{};
    std::array<double, 3> d{};
    std::array<double, 3> delta{};
    std::array<double, 3> log_lower{};
    std::array<double, 3> log_upper{};
    double ball_radius = 0.0;
    D1Variant d1_variant = D1Variant::derivation;

    /// Components whose box is empty (log_lower >= log_upper).
    std::vector<int> empty_components() const {
        std::vector<int> out;
        for (int i = 0; i < 3; ++i) {
            if (!(log_lower[i] < log_upper[i])) out.push_back(i);
        }
        return out;
    }
    bool consistent() const { return empty_components().empty(); }
};

/// Evaluates rho_i, d_i, delta_i, the log box and the ball radius h. Requires
/// the hypothesis to hold; an empty box is returned, not thrown, so callers
/// can report it.
inline AprioriBounds compute_bounds(const CoefficientSet& c, D1Variant variant = D1Variant::derivation,
                                    std::size_t grid_n = kDefaultGridN) {
    const double w = c.omega;
    const double theta = compute_theta(c, grid_n);
    const double one_m = 1.0 - theta;

    const double b_mean = c.b.mean();
    const double b_bot = min_max(c.b, grid_n).min;
    const double mu1_bot = min_max(c.mu1, grid_n).min;
    const double mu1_top = min_max(c.mu1, grid_n).max;
    const double beta1 = min_max(c.beta1, grid_n).max;
    const double beta2 = min_max(c.beta2, grid_n).max;
    const double beta1_bot = min_max(c.beta1, grid_n).min;
    const double alpha1_bot = min_max(c.alpha1, grid_n).min;
    const double gamma1_top = min_max(c.gamma1, grid_n).max;
    const double gamma2_top = min_max(c.gamma2, grid_n).max;
    const double mu2a1_bot = min_max_expr(c, Expr::Mu2Alpha1, grid_n).min;
    const double a2g2_top = min_max_expr(c, Expr::Alpha2Gamma2, grid_n).max;
    const double latent_top = min_max_expr(c, Expr::LatentLoss, grid_n).max;
    const double decay_top = min_max_expr(c, Expr::ADecay, grid_n).max;

    AprioriBounds r;
    r.theta = theta;
    r.d1_variant = variant;

    const double wb = w * b_mean;
    r.rho[1] = wb / (one_m * mu2a1_bot);
    r.rho[2] = theta * wb / (one_m * a2g2_top);
    r.rho[0] = wb / mu1_bot * (1.0 + gamma1_top / (one_m * mu2a1_bot) + theta * gamma2_top / (one_m * a2g2_top));

    // Means of sums are sums of means; exact for both coefficient forms.
    r.d[1] = 2.0 * w * (c.mu2.mean() + c.alpha1.mean() + c.gamma1.mean());
    r.d[2] = 2.0 * w * (c.mu3.mean() + c.alpha2.mean() + c.gamma2.mean());

    r.delta[1] = beta1_bot / latent_top;
    r.delta[2] = alpha1_bot / decay_top;

    const double x2 = variant == D1Variant::derivation ? r.rho[1] : r.delta[1];
    const double x3 = variant == D1Variant::derivation ? r.rho[2] : r.delta[2];
    r.d[0] = 2.0 * (w * c.mu1.mean() + beta1 * x2 + beta2 * x3);

    r.delta[0] = w * b_bot / (w * mu1_top + beta1 * r.rho[1] * std::exp(r.d[1]) + beta2 * r.rho[2] * std::exp(r.d[2]));

    r.ball_radius = 0.0;
    for (int i = 0; i < 3; ++i) {
        r.log_lower[i] = std::log(r.delta[i]);
        const double up = std::log(r.rho[i] / w);
        r.log_upper[i] = up + r.d[i];
        r.ball_radius += std::max(std::abs(r.log_lower[i]), std::abs(up) + r.d[i]);
    }
    return r;
}

}  // namespace virusperiod
