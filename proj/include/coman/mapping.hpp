#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "coman/types.hpp"

namespace coman {

/// Tangential forces below this magnitude [N m] are treated as exactly zero.
inline constexpr double kForceDeadband = 1e-12;

struct ControlGains {
    double k_px = 20.0;
    double k_vx = 8.5;
    double k_palpha = 1.0;
    double k_valpha = 1.5;
    double k_pbeta = 3.0;
    double k_vbeta = 2.85;
    double epsilon = 2.4;
    double k_i = 0.0;     ///< integral gain on the inclination error
    double i_sat = 0.5;   ///< clamp on the integral accumulator [rad s]

    [[nodiscard]] std::vector<std::string> violations() const
    {
        std::vector<std::string> out;
        auto positive = [&](double v, const char* key) {
            if (!(v > 0.0) || !std::isfinite(v)) out.push_back(std::string(key) + " must be > 0");
        };
        positive(k_px, "gains.k_px");
        positive(k_vx, "gains.k_vx");
        positive(k_palpha, "gains.k_palpha");
        positive(k_valpha, "gains.k_valpha");
        positive(k_pbeta, "gains.k_pbeta");
        positive(k_vbeta, "gains.k_vbeta");
        positive(epsilon, "gains.epsilon");
        if (!(k_i >= 0.0)) out.push_back("gains.k_i must be >= 0");
        if (!(i_sat >= 0.0)) out.push_back("gains.i_sat must be >= 0");
        return out;
    }

    /// Tuning-guideline breaches. Not fatal.
    [[nodiscard]] std::vector<std::string> warnings() const
    {
        std::vector<std::string> out;
        if (!(k_px > k_palpha)) out.push_back("gains.k_px should exceed gains.k_palpha");
        if (!(k_vx > k_valpha)) out.push_back("gains.k_vx should exceed gains.k_valpha");
        return out;
    }

    void validate() const
    {
        if (auto v = violations(); !v.empty()) throw ConfigError(v.front());
    }
};

/// Symmetric saturation sign(x) min(|x|, lambda).
[[nodiscard]] inline double sat(double x, double lambda)
{
    return std::clamp(x, -lambda, lambda);
}

/// One-sided saturation onto [0, lambda].
[[nodiscard]] inline double pos_sat(double x, double lambda)
{
    return std::max(sat(x, lambda), 0.0);
}

/// Scaling that makes the attitude map reach pi/2 exactly at f_t = T_max L.
[[nodiscard]] inline double gamma_param(double epsilon, const ActuatorLimits& lim, const PhysicalParams& p)
{
    return kPi / (2.0 * std::atan(epsilon * lim.T_max * p.L));
}

/// Desired relative attitude for a requested tangential force.
[[nodiscard]] inline double theta_map(double f_t, double gamma, double epsilon)
{
    return sat(gamma * std::atan(epsilon * f_t), kPi / 2.0);
}

/**
 * Normalized thrust f_t / sin(theta_d) for the desired-angle law.
 *
 * The quotient has a removable singularity at f_t = 0 with limit 1/(gamma eps);
 * inside the force deadband the limit value is returned.
 */
[[nodiscard]] inline double thrust_desired_angle(double f_t, double theta_d, double gamma, double epsilon)
{
    if (std::abs(f_t) < kForceDeadband || theta_d == 0.0) return 1.0 / (gamma * epsilon);
    return f_t / std::sin(theta_d);
}

/// Normalized thrust divided by the measured relative attitude, clipped to [0, T_max L].
[[nodiscard]] inline double thrust_feedforward(double f_t, double theta, const ActuatorLimits& lim, const PhysicalParams& p)
{
    const double ceiling = lim.T_max * p.L;
    // no force requested: a zero-thrust rest, even with the thrust line on the rod
    if (std::abs(f_t) < kForceDeadband) return 0.0;
    const double s = std::sin(theta);
    const double quotient = s == 0.0 ? std::copysign(std::numeric_limits<double>::infinity(), f_t) : f_t / s;
    return pos_sat(quotient, ceiling);
}

}  // namespace coman
