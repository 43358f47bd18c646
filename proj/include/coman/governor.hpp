#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "coman/controller.hpp"
#include "coman/dynamics.hpp"
#include "coman/equilibrium.hpp"
#include "coman/mapping.hpp"
#include "coman/types.hpp"

namespace coman {

/// Everything the governor needs to predict the closed loop.
struct ClosedLoopModel {
    PhysicalParams params;
    ActuatorLimits limits;
    ControlGains gains;
    ThrustMode mode = ThrustMode::Feedforward;
    bool ground_stop = false;
};

struct RGConfig {
    double t_s = 0.2;            ///< update period [s]
    double t_h = 15.0;           ///< prediction horizon [s]
    double dt = 5e-4;            ///< prediction integration step [s]
    int bisection_iters = 10;
    double margin_u = 0.02;      ///< relative margin on every input limit
    bool enforce_alpha_range = true;
    double alpha_margin = 0.02;  ///< [rad] inside the attainable inclination range

    [[nodiscard]] std::vector<std::string> violations() const
    {
        std::vector<std::string> out;
        if (!(t_s > 0.0)) out.push_back("rg.t_s must be > 0");
        if (!(t_h > 0.0)) out.push_back("rg.t_h must be > 0");
        if (!(dt > 0.0)) out.push_back("rg.dt must be > 0");
        if (dt > 0.0 && t_s > 0.0 && dt > t_s) out.push_back("rg.dt must not exceed rg.t_s");
        if (bisection_iters < 1) out.push_back("rg.bisection_iters must be >= 1");
        if (!(margin_u >= 0.0 && margin_u < 1.0)) out.push_back("rg.margin_u must lie in [0, 1)");
        if (!(alpha_margin >= 0.0)) out.push_back("rg.alpha_margin must be >= 0");
        return out;
    }

    void validate() const
    {
        if (auto v = violations(); !v.empty()) throw ConfigError(v.front());
    }
};

/// Outcome of one governor update.
struct RGDecision {
    double t = 0.0;
    double c = 0.0;             ///< step fraction taken towards the desired reference
    Reference applied;          ///< reference applied from this update on
    bool applied_feasible = true;
    int predictions = 0;
};

/// Convex combination r_a + c (r_d - r_a).
[[nodiscard]] inline Reference blend(const Reference& from, const Reference& to, double c)
{
    return {from.x + c * (to.x - from.x), from.alpha + c * (to.alpha - from.alpha)};
}

/// True when the commanded (pre-saturation) inputs and the inclination respect the tightened limits.
[[nodiscard]] inline bool sample_admissible(const SystemState& s, const ControlOutput& out, const RGConfig& cfg,
                                            const ActuatorLimits& lim, const AlphaRange& range)
{
    const double k = 1.0 - cfg.margin_u;
    if (!(out.u_unsat.u1 >= 0.0 && out.u_unsat.u1 <= k * lim.T_max)) return false;
    if (!(std::abs(out.u_unsat.u2) <= k * lim.tau_max)) return false;
    if (!(std::abs(out.u_unsat.u3) <= k * lim.F_max)) return false;
    if (cfg.enforce_alpha_range &&
        !(s.alpha >= range.alpha_min + cfg.alpha_margin && s.alpha <= range.alpha_max - cfg.alpha_margin))
        return false;
    return true;
}

/**
 * Simulates the closed loop under a constant reference over the horizon and
 * reports whether every sample stays admissible. A numerical blow-up counts
 * as infeasible.
 */
[[nodiscard]] inline bool predict_feasible(const SystemState& s0, const ControllerState& cs0, const Reference& ref,
                                           const RGConfig& cfg, const ClosedLoopModel& m)
{
    const AlphaRange range = attainable_alpha_range(m.params, m.limits);
    const long steps = static_cast<long>(std::ceil(cfg.t_h / cfg.dt - 1e-9));
    SystemState s = s0;
    ControllerState cs = cs0;
    try {
        for (long k = 0; k < steps; ++k) {
            const ControlOutput out = compute_control(s, ref, m.gains, m.params, m.limits, cs, cfg.dt);
            if (!sample_admissible(s, out, cfg, m.limits, range)) return false;
            s = step(s, out.u, m.params, cfg.dt);
            if (m.ground_stop) apply_ground_stop(s);
        }
    } catch (const NumericalError&) {
        return false;
    }
    return true;
}

/**
 * One governor update: the largest c in [0, 1] (to bisection resolution) whose
 * blended reference is predicted feasible. c = 1 is tried first. When even the
 * currently applied reference is predicted infeasible the reference is held
 * and the decision is flagged.
 */
[[nodiscard]] inline RGDecision rg_step(const SystemState& s, const ControllerState& cs, const Reference& applied,
                                        const Reference& desired, const RGConfig& cfg, const ClosedLoopModel& m,
                                        double t = 0.0)
{
    RGDecision d;
    d.t = t;
    auto feasible = [&](const Reference& r) {
        ++d.predictions;
        return predict_feasible(s, cs, r, cfg, m);
    };

    if (feasible(desired)) {
        d.c = 1.0;
        d.applied = desired;
        return d;
    }
    if (applied == desired || !feasible(applied)) {
        d.c = 0.0;
        d.applied = applied;
        d.applied_feasible = false;
        return d;
    }

    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < cfg.bisection_iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(blend(applied, desired, mid)))
            lo = mid;
        else
            hi = mid;
    }
    d.c = lo;
    d.applied = blend(applied, desired, lo);
    return d;
}

}  // namespace coman
