#pragma once

#include <algorithm>
#include <cmath>
#include <string_view>

#include "coman/mapping.hpp"
#include "coman/types.hpp"

namespace coman {

/// How the outer loop turns the tangential force into a thrust magnitude.
enum class ThrustMode {
    DesiredAngle,  ///< divide by sin of the desired relative attitude
    Feedforward,   ///< divide by sin of the measured relative attitude, then clip
};

[[nodiscard]] inline std::string_view to_string(ThrustMode m)
{
    return m == ThrustMode::DesiredAngle ? "eq10" : "eq13";
}

/// Position/inclination set-point tracked by the cascade.
struct Reference {
    double x = 0.0;
    double alpha = 0.0;

    friend bool operator==(const Reference&, const Reference&) = default;
};

/// Mutable part of the controller. gamma is refreshed on every control call.
struct ControllerState {
    double integral_alpha = 0.0;
    double gamma = 1.0;
    ThrustMode mode = ThrustMode::Feedforward;
};

[[nodiscard]] inline ControllerState make_controller_state(const ControlGains& g, const ActuatorLimits& lim,
                                                           const PhysicalParams& p, ThrustMode mode)
{
    return {0.0, gamma_param(g.epsilon, lim, p), mode};
}

struct ControlOutput {
    Inputs u;        ///< after saturation
    Inputs u_unsat;  ///< as commanded by the cascade
    double f_t = 0.0;
    double theta_d = 0.0;
    double beta_d = 0.0;
};

/// UGV PD law on the object position.
[[nodiscard]] inline double ugv_control(const SystemState& s, double x_a, const ControlGains& g)
{
    return g.k_px * (x_a - s.x) - g.k_vx * s.x_dot;
}

/// Outer-loop PD with gravity compensation plus an optional clamped integral.
[[nodiscard]] inline double tangential_force(const SystemState& s, double alpha_a, const ControlGains& g,
                                             const PhysicalParams& p, ControllerState& cs, double dt)
{
    const double err = alpha_a - s.alpha;
    double f_t = g.k_palpha * err - g.k_valpha * s.alpha_dot + p.gravity_moment() * std::cos(s.alpha);
    if (g.k_i > 0.0) {
        cs.integral_alpha = std::clamp(cs.integral_alpha + err * dt, -g.i_sat, g.i_sat);
        f_t += g.k_i * cs.integral_alpha;
    }
    return f_t;
}

/// Inner attitude PD, u2 = k_pbeta (beta_d - beta) - k_vbeta beta_dot.
[[nodiscard]] inline double attitude_control(const SystemState& s, double beta_d, const ControlGains& g)
{
    return g.k_pbeta * (beta_d - s.beta) - g.k_vbeta * s.beta_dot;
}

/**
 * Full cascade: UGV force, tangential force, attitude map, thrust law, and
 * allocation onto the three actuators followed by hard saturation.
 *
 * u_unsat.u1 is the thrust requested at the desired attitude,
 * f_t / (L sin theta_d), in both modes. In feedforward mode the applied thrust
 * divides by the measured attitude instead and is clipped to [0, T_max].
 * u3 cancels the horizontal thrust component actually delivered, so the
 * saturated branch uses the saturated thrust.
 */
[[nodiscard]] inline ControlOutput compute_control(const SystemState& s, const Reference& ref, const ControlGains& g,
                                                   const PhysicalParams& p, const ActuatorLimits& lim,
                                                   ControllerState& cs, double dt)
{
    cs.gamma = gamma_param(g.epsilon, lim, p);

    ControlOutput out;
    const double u_ff = ugv_control(s, ref.x, g);
    out.f_t = tangential_force(s, ref.alpha, g, p, cs, dt);
    out.theta_d = theta_map(out.f_t, cs.gamma, g.epsilon);
    out.beta_d = s.alpha + out.theta_d;

    const double requested = thrust_desired_angle(out.f_t, out.theta_d, cs.gamma, g.epsilon) / p.L;
    const double cos_beta = std::cos(s.beta);

    out.u_unsat.u1 = requested;
    out.u_unsat.u2 = attitude_control(s, out.beta_d, g);
    out.u_unsat.u3 = u_ff - out.u_unsat.u1 * cos_beta;

    out.u.u1 = cs.mode == ThrustMode::DesiredAngle ? std::clamp(requested, 0.0, lim.T_max)
                                                   : thrust_feedforward(out.f_t, s.beta - s.alpha, lim, p) / p.L;
    out.u.u2 = sat(out.u_unsat.u2, lim.tau_max);
    out.u.u3 = sat(u_ff - out.u.u1 * cos_beta, lim.F_max);
    return out;
}

}  // namespace coman
