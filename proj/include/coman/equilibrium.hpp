#pragma once

#include <cmath>

#include "coman/mapping.hpp"
#include "coman/types.hpp"

namespace coman {

struct AlphaRange {
    double alpha_min = 0.0;
    double alpha_max = kPi;

    /// Closed-interval membership.
    [[nodiscard]] bool contains(double a) const { return a >= alpha_min && a <= alpha_max; }
    /// Open-interval membership, the admissibility test for references.
    [[nodiscard]] bool contains_open(double a) const { return a > alpha_min && a < alpha_max; }
};

struct BetaRange {
    double beta_min = 0.0;
    double beta_max = 0.0;

    [[nodiscard]] bool contains(double b, double tol = 0.0) const { return b >= beta_min - tol && b <= beta_max + tol; }
};

/// Inclinations that can be held at rest without exceeding T_max.
[[nodiscard]] inline AlphaRange attainable_alpha_range(const PhysicalParams& p, const ActuatorLimits& lim)
{
    const double weight = p.apparent_mass() * p.g;
    if (lim.T_max >= weight) return {0.0, kPi};
    return {std::acos(lim.T_max / weight), std::acos(-lim.T_max / weight)};
}

/**
 * Attitudes compatible with a rest configuration at alpha_bar and u1 <= T_max.
 *
 * For cos(alpha_bar) >= 0 the relative attitude theta = beta - alpha_bar must
 * satisfy sin(theta) >= k, k = M_a g cos(alpha_bar) / T_max. For
 * cos(alpha_bar) < 0 the thrust must pull the other way, so theta lies in
 * [-pi + asin(k'), -asin(k')] with k' = -M_a g cos(alpha_bar) / T_max.
 */
[[nodiscard]] inline BetaRange attainable_beta_range(double alpha_bar, const PhysicalParams& p, const ActuatorLimits& lim)
{
    if (!attainable_alpha_range(p, lim).contains(alpha_bar))
        throw DomainError("alpha_bar " + std::to_string(alpha_bar) + " is outside the attainable range");
    const double ratio = p.apparent_mass() * p.g * std::cos(alpha_bar) / lim.T_max;
    if (ratio >= 0.0) {
        const double s = std::asin(std::min(ratio, 1.0));
        return {s + alpha_bar, kPi - s + alpha_bar};
    }
    const double s = std::asin(std::min(-ratio, 1.0));
    return {alpha_bar - kPi + s, alpha_bar - s};
}

/// Rest inputs for the configuration (alpha_bar, beta_bar); any x is admissible.
[[nodiscard]] inline Inputs steady_state_inputs(double alpha_bar, double beta_bar, const PhysicalParams& p)
{
    constexpr double kTiny = 1e-12;
    const double c = std::cos(alpha_bar);
    const double s = std::sin(beta_bar - alpha_bar);
    const double weight = p.apparent_mass() * p.g;
    if (std::abs(s) < kTiny) {
        // gravity moment vanishes with the thrust line along the rod: any u1
        // holds, take the minimum-thrust one
        if (std::abs(weight * c) < kTiny) return {0.0, 0.0, 0.0};
        throw DomainError("no equilibrium: thrust is aligned with the rod but gravity moment is nonzero");
    }
    const double u1 = weight * c / s;
    return {u1, 0.0, -u1 * std::cos(beta_bar)};
}

/// Steady attitude the cascade settles to for a desired inclination.
[[nodiscard]] inline double desired_beta(double alpha_d, const ControlGains& gains, const PhysicalParams& p,
                                         const ActuatorLimits& lim)
{
    if (!attainable_alpha_range(p, lim).contains_open(alpha_d))
        throw DomainError("alpha_d " + std::to_string(alpha_d) + " is outside the open attainable range");
    const double gamma = gamma_param(gains.epsilon, lim, p);
    return alpha_d + theta_map(p.gravity_moment() * std::cos(alpha_d), gamma, gains.epsilon);
}

}  // namespace coman
