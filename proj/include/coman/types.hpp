#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace coman {

inline constexpr double kPi = std::numbers::pi;

/// Raised when a configuration or parameter set violates its invariants.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an integration produces non-finite values.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an angle or reference lies outside the attainable set.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/**
 * Physical parameters of the cart + rod + birotor chain.
 *
 * Defaults are the identified testbed values (viscous friction included).
 *
 * The aggregates (total mass, apparent tip mass, reduced inertia) are
 * computed on demand so they can never go stale after a field edit.
 */
struct PhysicalParams {
    double m_a = 0.1;           ///< UAV mass [kg]
    double I_a = 1.014e-3;      ///< UAV inertia [kg m^2]
    double m_s = 1.0;           ///< UGV mass [kg]
    double m_b = 0.03;          ///< rod mass [kg]
    double I_b = 2.0;           ///< rod inertia [kg m^2]
    double L = 1.25;            ///< rod length [m]
    double d_G = 0.625;         ///< rod centre of mass from the cart [m]
    double g = 9.81;            ///< gravity [m/s^2]
    double zeta_x = 1.5;        ///< viscous friction on x [N s/m]
    double zeta_alpha = 0.1;    ///< viscous friction on alpha [N m s]
    double zeta_beta = 0.05;    ///< viscous friction on beta [N m s]

    [[nodiscard]] double total_mass() const { return m_s + m_b + m_a; }
    [[nodiscard]] double apparent_mass() const { return m_b * d_G / L + m_a; }
    [[nodiscard]] double reduced_inertia() const { return (m_b * d_G * d_G + I_b) / L + m_a * L; }

    /// M_a L g: the peak gravity moment about the cart joint.
    [[nodiscard]] double gravity_moment() const { return apparent_mass() * L * g; }

    /// Returns every violated invariant, one message per offending key.
    [[nodiscard]] std::vector<std::string> violations() const
    {
        std::vector<std::string> out;
        auto positive = [&](double v, const char* key) {
            if (!(v > 0.0) || !std::isfinite(v)) out.push_back(std::string(key) + " must be > 0");
        };
        auto nonneg = [&](double v, const char* key) {
            if (!(v >= 0.0) || !std::isfinite(v)) out.push_back(std::string(key) + " must be >= 0");
        };
        positive(m_a, "params.m_a");
        positive(I_a, "params.I_a");
        positive(m_s, "params.m_s");
        positive(m_b, "params.m_b");
        positive(I_b, "params.I_b");
        positive(L, "params.L");
        positive(d_G, "params.d_G");
        positive(g, "params.g");
        nonneg(zeta_x, "params.zeta_x");
        nonneg(zeta_alpha, "params.zeta_alpha");
        nonneg(zeta_beta, "params.zeta_beta");
        if (d_G > L) out.push_back("params.d_G must be <= params.L");
        return out;
    }

    void validate() const
    {
        if (auto v = violations(); !v.empty()) throw ConfigError(v.front());
    }
};

/// Generalized coordinates and rates. beta is left unwrapped during integration.
struct SystemState {
    double x = 0.0;
    double x_dot = 0.0;
    double alpha = 0.0;
    double alpha_dot = 0.0;
    double beta = 0.0;
    double beta_dot = 0.0;

    [[nodiscard]] bool finite() const
    {
        return std::isfinite(x) && std::isfinite(x_dot) && std::isfinite(alpha) &&
               std::isfinite(alpha_dot) && std::isfinite(beta) && std::isfinite(beta_dot);
    }

    friend bool operator==(const SystemState&, const SystemState&) = default;
};

/// Thrust u1 [N], UAV torque u2 [N m], UGV force u3 [N].
struct Inputs {
    double u1 = 0.0;
    double u2 = 0.0;
    double u3 = 0.0;

    friend bool operator==(const Inputs&, const Inputs&) = default;
};

struct ActuatorLimits {
    double T_max = 5.0;     ///< [N]
    double tau_max = 0.2;   ///< [N m]
    double F_max = 20.0;    ///< [N]

    [[nodiscard]] std::vector<std::string> violations() const
    {
        std::vector<std::string> out;
        if (!(T_max > 0.0)) out.push_back("limits.T_max must be > 0");
        if (!(tau_max > 0.0)) out.push_back("limits.tau_max must be > 0");
        if (!(F_max > 0.0)) out.push_back("limits.F_max must be > 0");
        if (!(F_max > T_max)) out.push_back("limits.F_max must exceed limits.T_max");
        return out;
    }

    void validate() const
    {
        if (auto v = violations(); !v.empty()) throw ConfigError(v.front());
    }

    /// True iff u satisfies the actuator box exactly.
    [[nodiscard]] bool admits(const Inputs& u) const
    {
        return u.u1 >= 0.0 && u.u1 <= T_max && std::abs(u.u2) <= tau_max && std::abs(u.u3) <= F_max;
    }
};

/// Wraps an angle to [-pi, pi).
[[nodiscard]] inline double wrap_angle(double a)
{
    double w = std::fmod(a + kPi, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w - kPi;
}

}  // namespace coman
