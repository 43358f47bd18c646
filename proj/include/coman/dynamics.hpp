#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "coman/types.hpp"

namespace coman {

/// Time derivative of a SystemState, laid out field for field.
struct StateDerivative {
    double x_dot = 0.0;
    double x_ddot = 0.0;
    double alpha_dot = 0.0;
    double alpha_ddot = 0.0;
    double beta_dot = 0.0;
    double beta_ddot = 0.0;
};

/// Inertia matrix of the (x, alpha) manipulator.
[[nodiscard]] inline Eigen::Matrix2d mass_matrix(double alpha, const PhysicalParams& p)
{
    const double off = -p.apparent_mass() * p.L * std::sin(alpha);
    Eigen::Matrix2d m;
    m << p.total_mass(), off, off, p.reduced_inertia() * p.L;
    return m;
}

[[nodiscard]] inline Eigen::Matrix2d coriolis_matrix(double alpha, double alpha_dot, const PhysicalParams& p)
{
    Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
    c(0, 1) = -p.apparent_mass() * p.L * alpha_dot * std::cos(alpha);
    return c;
}

[[nodiscard]] inline Eigen::Vector2d gravity_vector(double alpha, const PhysicalParams& p)
{
    return {0.0, p.gravity_moment() * std::cos(alpha)};
}

/// Generalized force produced by the actuators on (x, alpha).
[[nodiscard]] inline Eigen::Vector2d generalized_force(const SystemState& s, const Inputs& u, const PhysicalParams& p)
{
    return {u.u3 + u.u1 * std::cos(s.beta), u.u1 * p.L * std::sin(s.beta - s.alpha)};
}

/**
 * Equations of motion with linear viscous friction on every coordinate.
 *
 * Inputs are applied as given; saturation is the caller's job.
 */
[[nodiscard]] inline StateDerivative forward_dynamics(const SystemState& s, const Inputs& u, const PhysicalParams& p)
{
    const Eigen::Matrix2d m = mass_matrix(s.alpha, p);
    const Eigen::Vector2d q_dot(s.x_dot, s.alpha_dot);
    const Eigen::Vector2d friction(p.zeta_x * s.x_dot, p.zeta_alpha * s.alpha_dot);
    const Eigen::Vector2d rhs = generalized_force(s, u, p) - coriolis_matrix(s.alpha, s.alpha_dot, p) * q_dot -
                                gravity_vector(s.alpha, p) - friction;

    // Closed-form 2x2 solve; the determinant is bounded below by
    // M_t I_0 L - (M_a L)^2 > 0 for any physical parameter set.
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (!(det > 0.0)) throw NumericalError("mass matrix is singular");
    const double x_ddot = (m(1, 1) * rhs(0) - m(0, 1) * rhs(1)) / det;
    const double alpha_ddot = (m(0, 0) * rhs(1) - m(1, 0) * rhs(0)) / det;

    return {s.x_dot, x_ddot, s.alpha_dot, alpha_ddot, s.beta_dot, (u.u2 - p.zeta_beta * s.beta_dot) / p.I_a};
}

/// Kinetic plus potential energy, with U(alpha) = M_a L g sin(alpha).
[[nodiscard]] inline double total_energy(const SystemState& s, const PhysicalParams& p)
{
    const Eigen::Vector2d q_dot(s.x_dot, s.alpha_dot);
    const double kinetic = 0.5 * q_dot.dot(mass_matrix(s.alpha, p) * q_dot) + 0.5 * p.I_a * s.beta_dot * s.beta_dot;
    return kinetic + p.gravity_moment() * std::sin(s.alpha);
}

namespace detail {

[[nodiscard]] inline SystemState advance(const SystemState& s, const StateDerivative& d, double h)
{
    return {s.x + h * d.x_dot,         s.x_dot + h * d.x_ddot,   s.alpha + h * d.alpha_dot,
            s.alpha_dot + h * d.alpha_ddot, s.beta + h * d.beta_dot, s.beta_dot + h * d.beta_ddot};
}

}  // namespace detail

/// One classical RK4 step with the inputs held over the whole step.
[[nodiscard]] inline SystemState step(const SystemState& s, const Inputs& u, const PhysicalParams& p, double dt)
{
    if (dt < 0.0) throw ConfigError("integration step must be >= 0");
    if (dt == 0.0) return s;

    const StateDerivative k1 = forward_dynamics(s, u, p);
    const StateDerivative k2 = forward_dynamics(detail::advance(s, k1, 0.5 * dt), u, p);
    const StateDerivative k3 = forward_dynamics(detail::advance(s, k2, 0.5 * dt), u, p);
    const StateDerivative k4 = forward_dynamics(detail::advance(s, k3, dt), u, p);

    const double w = dt / 6.0;
    auto comb = [w](double a, double b, double c, double d) { return w * (a + 2.0 * b + 2.0 * c + d); };
    SystemState next{
        s.x + comb(k1.x_dot, k2.x_dot, k3.x_dot, k4.x_dot),
        s.x_dot + comb(k1.x_ddot, k2.x_ddot, k3.x_ddot, k4.x_ddot),
        s.alpha + comb(k1.alpha_dot, k2.alpha_dot, k3.alpha_dot, k4.alpha_dot),
        s.alpha_dot + comb(k1.alpha_ddot, k2.alpha_ddot, k3.alpha_ddot, k4.alpha_ddot),
        s.beta + comb(k1.beta_dot, k2.beta_dot, k3.beta_dot, k4.beta_dot),
        s.beta_dot + comb(k1.beta_ddot, k2.beta_ddot, k3.beta_ddot, k4.beta_ddot),
    };
    if (!next.finite()) throw NumericalError("integration produced a non-finite state");
    return next;
}

/**
 * Unilateral stop at the ground: alpha is kept in [0, pi] and the velocity
 * component driving it further out is removed. Returns true on contact.
 */
inline bool apply_ground_stop(SystemState& s)
{
    if (s.alpha > kPi) {
        s.alpha = kPi;
        s.alpha_dot = std::min(s.alpha_dot, 0.0);
        return true;
    }
    if (s.alpha < 0.0) {
        s.alpha = 0.0;
        s.alpha_dot = std::max(s.alpha_dot, 0.0);
        return true;
    }
    return false;
}

}  // namespace coman
