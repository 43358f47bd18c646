#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "coman/dynamics.hpp"
#include "coman/mapping.hpp"
#include "coman/types.hpp"

namespace coman {

/**
 * Constants of the small-gain stability argument for the closed loop.
 *
 * Everything here is a computable bound; gamma_in is estimated numerically
 * from the inner attitude loop. All angles in radians.
 */
struct StabilityCertificate {
    double xi = 0.1;              ///< margin restricting the attitude error to |theta~| <= pi/2 - xi
    double k_c = 0.0;             ///< ||C(q, q_dot) q_dot|| <= k_c ||q_dot||^2
    double b = 0.0;
    double b_prime = 0.0;
    double lambda_m_M = 0.0;      ///< smallest eigenvalue of M(q) over alpha in [0, pi]
    double lambda_M_M = 0.0;      ///< largest eigenvalue of M(q) over alpha in [0, pi]
    double lambda_m_Kv = 0.0;
    double lambda_M_Kv = 0.0;
    double lambda_M_Kp = 0.0;
    double delta_constant = 0.0;  ///< saturation level of the attitude-error disturbance bound
    double gamma_p_max = 0.0;
    double gamma_p = 0.0;
    double mu_max = 0.0;
    double mu = 0.0;
    double q_max_1 = 0.0;
    double q_max_2 = 0.0;
    double q_max = 0.0;           ///< strict bound on ||q~||
    double q_cert = 0.0;          ///< radius at which the attitude restriction is evaluated (q_max / 2)
    double theta_max_1 = 0.0;
    double theta_max_2 = 0.0;
    double theta_max = 0.0;
    double rho = 0.0;
    double gamma_out = 0.0;
    double gamma_in_est = 0.0;
    bool small_gain_ok = false;
};

/// Unit-thrust-range bound on ||delta||: (2/pi + 2 M_a L g) min(|theta~|, 1).
[[nodiscard]] inline double delta_bound(double theta_tilde, const PhysicalParams& p)
{
    const double level = 2.0 / kPi + 2.0 * p.gravity_moment();
    return level * std::min(std::abs(theta_tilde), 1.0);
}

/**
 * Saturation level of the delta bound valid for any T_max.
 *
 * The first term bounds |f_t cot(theta_d)|, whose supremum over epsilon is
 * 2 T_max L / pi. It coincides with 2/pi only for T_max L = 1, so the larger
 * of the two is used.
 */
[[nodiscard]] inline double delta_constant(const PhysicalParams& p, const ActuatorLimits& lim)
{
    return 2.0 / kPi * std::max(1.0, lim.T_max * p.L) + 2.0 * p.gravity_moment();
}

[[nodiscard]] inline double delta_bound(double theta_tilde, const PhysicalParams& p, const ActuatorLimits& lim)
{
    return delta_constant(p, lim) * std::min(std::abs(theta_tilde), 1.0);
}

/// Exact norm of the attitude-error disturbance for a given operating point.
[[nodiscard]] inline double delta_norm(double f_t, double alpha, double theta_tilde, double epsilon,
                                       const PhysicalParams& p, const ActuatorLimits& lim)
{
    const double gamma = gamma_param(epsilon, lim, p);
    const double theta_bar = theta_map(f_t, gamma, epsilon);
    double cot_term = 0.0;
    if (std::abs(f_t) < kForceDeadband) {
        cot_term = 1.0 / (gamma * epsilon);
    } else if (std::abs(theta_bar) < kPi / 2.0) {
        cot_term = f_t / std::tan(theta_bar);
    }
    const double s = std::sin(0.5 * theta_tilde);
    return std::abs(cot_term * std::sin(theta_tilde) - 2.0 * p.gravity_moment() * std::cos(alpha) * s * s);
}

/**
 * Attitude error theta~_f that the desired-angle law would need to deliver
 * the torque of the feedforward law, i.e. the solution of
 *   f_t sin(theta_bar + theta~_f) / sin(theta_bar) = pos_sat(f_t / sin(theta), T_max L) sin(theta)
 * with theta = theta_bar + theta~, taking the root closest to zero.
 * Requires f_t > 0 and sin(theta_bar) > 0.
 */
[[nodiscard]] inline double equivalent_attitude_error(double f_t, double theta_bar, double theta_tilde,
                                                      const ActuatorLimits& lim, const PhysicalParams& p)
{
    if (!(f_t > 0.0) || !(std::sin(theta_bar) > 0.0))
        throw DomainError("equivalent attitude error needs f_t > 0 and sin(theta_bar) > 0");
    const double theta = theta_bar + theta_tilde;
    const double s = std::sin(theta);
    const double f_new = s == 0.0 ? 0.0 : pos_sat(f_t / s, lim.T_max * p.L) * s;
    const double r = std::clamp(f_new * std::sin(theta_bar) / f_t, -1.0, 1.0);
    const double a = wrap_angle(std::asin(r) - theta_bar);
    const double b = wrap_angle(kPi - std::asin(r) - theta_bar);
    return std::abs(a) <= std::abs(b) ? a : b;
}

/// Coriolis bound constant, M_a L.
[[nodiscard]] inline double k_c_constant(const PhysicalParams& p)
{
    return p.apparent_mass() * p.L;
}

/// Extreme eigenvalues of M(alpha) over [0, pi] by dense grid plus the known critical points.
[[nodiscard]] inline std::pair<double, double> matrix_eigen_extremes(const PhysicalParams& p, int grid = 2000)
{
    if (grid < 2) throw ConfigError("eigenvalue grid needs at least two points");
    std::vector<double> alphas;
    alphas.reserve(static_cast<std::size_t>(grid) + 3);
    for (int i = 0; i < grid; ++i) alphas.push_back(kPi * i / (grid - 1));
    alphas.insert(alphas.end(), {0.0, kPi / 2.0, kPi});

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double a : alphas) {
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(mass_matrix(a, p), Eigen::EigenvaluesOnly);
        lo = std::min(lo, es.eigenvalues()(0));
        hi = std::max(hi, es.eigenvalues()(1));
    }
    return {lo, hi};
}

/// Supremum admissible for the cross-term weight of the strict Lyapunov function.
[[nodiscard]] inline double gamma_p_max(const ControlGains& g, const PhysicalParams& p, double xi)
{
    if (!(xi > 0.0 && xi < kPi / 2.0)) throw ConfigError("xi must lie in (0, pi/2)");
    const auto [lambda_m_M, lambda_M_M] = matrix_eigen_extremes(p);
    (void)lambda_m_M;
    const double b = 0.5 * g.k_palpha;
    const double b_prime = g.k_palpha * std::sin(xi);
    const double lambda_m_Kv = g.k_valpha * std::sin(xi);
    const double lambda_M_Kv = g.k_vx;
    return std::min({std::sqrt(2.0 * b / lambda_M_M), 2.0 * b_prime / lambda_M_Kv,
                     lambda_m_Kv / (2.0 * (k_c_constant(p) + 2.0 * lambda_M_M))});
}

struct RestrictionConstants {
    double mu_max = 0.0;
    double mu = 0.0;
    double q_max_1 = 0.0;
    double q_max_2 = 0.0;
    double theta_max_1 = 0.0;
    double theta_max_2 = 0.0;
    double rho = 0.0;
};

namespace detail {

/// |acos(arg)|, or the unrestricted value when the argument leaves [-1, 1].
[[nodiscard]] inline double restricted_acos(double arg, double unrestricted)
{
    if (!(arg >= -1.0 && arg <= 1.0)) return unrestricted;
    return std::min(std::abs(std::acos(arg)), unrestricted);
}

}  // namespace detail

/**
 * Decay rate mu, state-error restrictions and the ISS ball radius for a
 * chosen gamma_p. mu is taken at half its supremum.
 *
 * The attitude restriction theta_max_1 is evaluated at ||q~|| = q_max_2 / 2:
 * at q_max_2 itself the admissible cosine reaches one and the restriction
 * collapses to zero.
 */
[[nodiscard]] inline RestrictionConstants restriction_constants(double gamma_p, const ControlGains& g,
                                                                const PhysicalParams& p, double xi,
                                                                double delta_level)
{
    const double gp_max = gamma_p_max(g, p, xi);
    if (!(gamma_p > 0.0 && gamma_p < gp_max)) throw ConfigError("gamma_p must lie in (0, gamma_p_max)");
    const auto [lambda_m_M, lambda_M_M] = matrix_eigen_extremes(p);
    (void)lambda_m_M;
    const double k_c = k_c_constant(p);
    const double lambda_m_Kv = g.k_valpha * std::sin(xi);
    const double unrestricted = kPi / 2.0 - xi;

    RestrictionConstants r;
    const double velocity_margin = 0.5 * lambda_m_Kv - 2.0 * gamma_p * lambda_M_M - gamma_p * k_c;
    r.mu_max = std::min({velocity_margin, gamma_p * g.k_px - 0.5 * gamma_p * gamma_p * g.k_vx,
                         gamma_p * g.k_palpha - 0.5 * gamma_p * gamma_p * g.k_valpha});
    if (!(r.mu_max > 0.0)) throw ConfigError("no admissible decay rate for these gains");
    r.mu = 0.5 * r.mu_max;

    r.q_max_1 = 2.0 * gamma_p * g.k_px / (2.0 * r.mu + gamma_p * gamma_p * g.k_vx) - 1.0;
    r.q_max_2 = 2.0 * gamma_p * g.k_palpha / (2.0 * r.mu + gamma_p * gamma_p * g.k_valpha) - 1.0;

    const double q_eval = 0.5 * std::min(r.q_max_1, r.q_max_2);
    const double denom1 = gamma_p * g.k_palpha / (1.0 + q_eval) - 0.5 * gamma_p * gamma_p * g.k_valpha + g.k_palpha;
    r.theta_max_1 = detail::restricted_acos((g.k_palpha + r.mu) / denom1, unrestricted);

    if (velocity_margin - r.mu > g.k_palpha) {
        r.theta_max_2 = unrestricted;
    } else {
        const double arg2 = -velocity_margin / g.k_palpha + (r.mu + g.k_palpha) / g.k_palpha;
        r.theta_max_2 = detail::restricted_acos(arg2, unrestricted);
    }

    r.rho = gamma_p * std::sqrt(1.0 + r.mu * r.mu) * delta_level / r.mu;
    return r;
}

/// Asymptotic gain from the attitude error to the desired-attitude rate.
[[nodiscard]] inline double gamma_out(const ControlGains& g, const PhysicalParams& p, double rho, double delta_level)
{
    const auto [lambda_m_M, lambda_M_M] = matrix_eigen_extremes(p);
    (void)lambda_M_M;
    const double k_c = k_c_constant(p);
    const double lambda_M_Kv = g.k_vx;
    const double lambda_M_Kp = g.k_px;
    const double eps = g.epsilon;
    const double lambda_qdot =
        eps * (g.k_palpha + p.gravity_moment()) + 1.0 + eps * g.k_valpha * (k_c + lambda_M_Kv) / lambda_m_M;
    const double lambda_qtilde = eps * g.k_valpha * lambda_M_Kp / lambda_m_M;
    const double lambda_delta = eps * g.k_valpha / lambda_m_M;
    return (lambda_qdot + lambda_qtilde) * rho + lambda_delta * delta_level;
}

/**
 * L-infinity induced gain of the inner attitude loop from beta_d rate to the
 * attitude error, i.e. the L1 norm of the impulse response of
 *   -(I_a s + k_vbeta) / (I_a s^2 + k_vbeta s + k_pbeta).
 *
 * The response is propagated with the exact state transition on a graded time
 * mesh (fine near the fast pole, coarse near the slow one) until the state
 * norm falls below 1e-9, and |y| is integrated with the trapezoidal rule.
 */
[[nodiscard]] inline double estimate_gamma_in(const ControlGains& g, const PhysicalParams& p)
{
    if (!(g.k_pbeta > 0.0 && g.k_vbeta > 0.0)) throw ConfigError("inner-loop gains must be positive");

    // state (beta~, beta_dot), unit impulse on the beta_d rate
    Eigen::Matrix2d a;
    a << 0.0, 1.0, -g.k_pbeta / p.I_a, -g.k_vbeta / p.I_a;
    const Eigen::EigenSolver<Eigen::Matrix2d> es(a, false);
    double rate_max = 0.0;
    double rate_min = std::numeric_limits<double>::infinity();
    double decay_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2; ++i) {
        const std::complex<double> lam = es.eigenvalues()(i);
        if (!(lam.real() < 0.0)) throw NumericalError("inner loop is not asymptotically stable");
        rate_max = std::max(rate_max, std::abs(lam));
        rate_min = std::min(rate_min, std::abs(lam));
        decay_min = std::min(decay_min, -lam.real());
    }

    constexpr double kResolution = 1e-3;
    constexpr double kGrowth = 1.01;
    constexpr double kDecayed = 1e-9;
    const double h_max = kResolution / rate_min;
    const double t_limit = 100.0 * std::log(1.0 / kDecayed) / decay_min;

    Eigen::Vector2d x(-1.0, 0.0);
    double h = kResolution / rate_max;
    double t = 0.0;
    double l1 = 0.0;
    while (x.norm() >= kDecayed) {
        if (t > t_limit) throw NumericalError("impulse response did not decay");
        const Eigen::Matrix2d phi = (a * h).exp();
        const Eigen::Vector2d next = phi * x;
        l1 += 0.5 * h * (std::abs(x(0)) + std::abs(next(0)));
        x = next;
        t += h;
        h = std::min(h * kGrowth, h_max);
    }
    return l1;
}

[[nodiscard]] inline bool small_gain_verdict(double gamma_in, double gamma_out_value)
{
    return gamma_in * gamma_out_value < 1.0;
}

[[nodiscard]] inline bool small_gain_verdict(const StabilityCertificate& cert)
{
    return small_gain_verdict(cert.gamma_in_est, cert.gamma_out);
}

/// Evaluates every constant of the certificate. gamma_p is half its supremum.
[[nodiscard]] inline StabilityCertificate compute_certificate(const ControlGains& g, const PhysicalParams& p,
                                                              const ActuatorLimits& lim, double xi = 0.1)
{
    g.validate();
    p.validate();
    StabilityCertificate c;
    c.xi = xi;
    c.k_c = k_c_constant(p);
    c.b = 0.5 * g.k_palpha;
    c.b_prime = g.k_palpha * std::sin(xi);
    std::tie(c.lambda_m_M, c.lambda_M_M) = matrix_eigen_extremes(p);
    c.lambda_m_Kv = g.k_valpha * std::sin(xi);
    c.lambda_M_Kv = g.k_vx;
    c.lambda_M_Kp = g.k_px;
    c.delta_constant = delta_constant(p, lim);
    c.gamma_p_max = gamma_p_max(g, p, xi);
    c.gamma_p = 0.5 * c.gamma_p_max;

    const RestrictionConstants r = restriction_constants(c.gamma_p, g, p, xi, c.delta_constant);
    c.mu_max = r.mu_max;
    c.mu = r.mu;
    c.q_max_1 = r.q_max_1;
    c.q_max_2 = r.q_max_2;
    c.q_max = std::min(r.q_max_1, r.q_max_2);
    c.q_cert = 0.5 * c.q_max;
    c.theta_max_1 = r.theta_max_1;
    c.theta_max_2 = r.theta_max_2;
    c.theta_max = std::min({r.theta_max_1, r.theta_max_2, kPi / 2.0 - xi});
    c.rho = r.rho;
    c.gamma_out = gamma_out(g, p, c.rho, c.delta_constant);
    c.gamma_in_est = estimate_gamma_in(g, p);
    c.small_gain_ok = small_gain_verdict(c);
    return c;
}

/**
 * Strict diagonal-dominance conditions of the quadratic form that bounds the
 * Lyapunov derivative, at a given ||q~|| and attitude error.
 * Returns the four slacks; all must be positive.
 */
[[nodiscard]] inline std::array<double, 4> dominance_slacks(const StabilityCertificate& c, const ControlGains& g,
                                                            double q_norm, double theta_tilde)
{
    const double gp = c.gamma_p;
    const double one_q = 1.0 + q_norm;
    const double cos_t = std::cos(theta_tilde);
    const double p11 = gp * g.k_px / one_q - gp * gp * g.k_vx / (2.0 * one_q * one_q);
    const double p22 = gp * g.k_palpha * cos_t / one_q - gp * gp * g.k_valpha * cos_t / (2.0 * one_q * one_q);
    const double p33 = 0.5 * c.lambda_m_Kv - 2.0 * gp * c.lambda_M_M - gp * c.k_c;
    const double p24 = g.k_palpha * (1.0 - cos_t);
    return {p11 - c.mu, p22 - c.mu - p24, p33 - c.mu, p33 - c.mu - p24};
}

/// Flat key = value report, one constant per line.
[[nodiscard]] inline std::vector<std::pair<std::string, std::string>> certificate_entries(const StabilityCertificate& c)
{
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.9g", v);
        return std::string(buf);
    };
    return {
        {"xi", num(c.xi)},
        {"k_c", num(c.k_c)},
        {"b", num(c.b)},
        {"b_prime", num(c.b_prime)},
        {"lambda_m_M", num(c.lambda_m_M)},
        {"lambda_M_M", num(c.lambda_M_M)},
        {"lambda_m_Kv", num(c.lambda_m_Kv)},
        {"lambda_M_Kv", num(c.lambda_M_Kv)},
        {"lambda_M_Kp", num(c.lambda_M_Kp)},
        {"delta_constant", num(c.delta_constant)},
        {"gamma_p_max", num(c.gamma_p_max)},
        {"gamma_p", num(c.gamma_p)},
        {"mu_max", num(c.mu_max)},
        {"mu", num(c.mu)},
        {"q_max_1", num(c.q_max_1)},
        {"q_max_2", num(c.q_max_2)},
        {"q_max", num(c.q_max)},
        {"q_cert", num(c.q_cert)},
        {"theta_max_1", num(c.theta_max_1)},
        {"theta_max_2", num(c.theta_max_2)},
        {"theta_max", num(c.theta_max)},
        {"rho", num(c.rho)},
        {"gamma_out", num(c.gamma_out)},
        {"gamma_in_est", num(c.gamma_in_est)},
        {"loop_gain", num(c.gamma_in_est * c.gamma_out)},
        {"small_gain_ok", c.small_gain_ok ? "true" : "false"},
    };
}

}  // namespace coman
