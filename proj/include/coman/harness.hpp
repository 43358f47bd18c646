#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coman/controller.hpp"
#include "coman/dynamics.hpp"
#include "coman/equilibrium.hpp"
#include "coman/governor.hpp"
#include "coman/types.hpp"

namespace coman {

struct ScenarioConfig {
    std::string name = "custom";
    PhysicalParams params;
    ActuatorLimits limits;
    ControlGains gains;
    ThrustMode thrust_mode = ThrustMode::Feedforward;
    std::optional<RGConfig> rg;
    SystemState initial_state{0.0, 0.0, kPi / 2.0, 0.0, kPi / 2.0, 0.0};
    Reference desired_ref{0.5, 3.0 * kPi / 4.0};
    double t_end = 20.0;
    double dt = 5e-4;
    int log_decimation = 20;
    bool ground_contact = false;   ///< rod rests on the ground at alpha = 0 and alpha = pi
    bool validate_reference = true;

    [[nodiscard]] std::vector<std::string> violations() const
    {
        std::vector<std::string> out = params.violations();
        for (auto& v : limits.violations()) out.push_back(v);
        for (auto& v : gains.violations()) out.push_back(v);
        if (rg)
            for (auto& v : rg->violations()) out.push_back(v);
        if (!(t_end > 0.0)) out.push_back("t_end must be > 0");
        if (!(dt > 0.0)) out.push_back("dt must be > 0");
        if (log_decimation < 1) out.push_back("log_decimation must be >= 1");
        if (rg && dt > 0.0 && rg->t_s > 0.0) {
            const double ratio = rg->t_s / dt;
            if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) out.push_back("rg.t_s must be a multiple of dt");
        }
        if (!initial_state.finite()) out.push_back("initial_state must be finite");
        if (validate_reference && out.empty()) {
            const AlphaRange r = attainable_alpha_range(params, limits);
            if (!r.contains_open(desired_ref.alpha))
                out.push_back("desired_ref.alpha_d must lie inside the open attainable range (" +
                              std::to_string(r.alpha_min) + ", " + std::to_string(r.alpha_max) + ")");
        }
        return out;
    }

    void validate() const
    {
        if (auto v = violations(); !v.empty()) throw ConfigError(v.front());
    }

    [[nodiscard]] ClosedLoopModel model() const { return {params, limits, gains, thrust_mode, ground_contact}; }
};

/// One logged sample. beta and beta_d are wrapped to [-pi, pi).
struct LogRow {
    double t = 0.0;
    double x = 0.0, x_dot = 0.0, alpha = 0.0, alpha_dot = 0.0, beta = 0.0, beta_dot = 0.0;
    double u1 = 0.0, u2 = 0.0, u3 = 0.0;
    double u1_unsat = 0.0, u2_unsat = 0.0, u3_unsat = 0.0;
    double f_t = 0.0, theta_d = 0.0, beta_d = 0.0;
    double x_a = 0.0, alpha_a = 0.0, c_star = 1.0;

    friend bool operator==(const LogRow&, const LogRow&) = default;
};

inline constexpr std::array<const char*, 19> kLogColumns = {
    "t",  "x",        "x_dot",    "alpha",    "alpha_dot", "beta",    "beta_dot", "u1",  "u2",     "u3",
    "u1_unsat", "u2_unsat", "u3_unsat", "f_t", "theta_d", "beta_d", "x_a", "alpha_a", "c_star"};

[[nodiscard]] inline std::array<double, 19> row_values(const LogRow& r)
{
    return {r.t,        r.x,        r.x_dot,    r.alpha, r.alpha_dot, r.beta,   r.beta_dot, r.u1,    r.u2,    r.u3,
            r.u1_unsat, r.u2_unsat, r.u3_unsat, r.f_t,   r.theta_d,   r.beta_d, r.x_a,      r.alpha_a, r.c_star};
}

[[nodiscard]] inline LogRow row_from_values(const std::array<double, 19>& v)
{
    return {v[0],  v[1],  v[2],  v[3],  v[4],  v[5],  v[6],  v[7],  v[8], v[9],
            v[10], v[11], v[12], v[13], v[14], v[15], v[16], v[17], v[18]};
}

struct TrajectoryLog {
    std::vector<LogRow> rows;
    std::vector<RGDecision> rg_decisions;

    friend bool operator==(const TrajectoryLog& a, const TrajectoryLog& b) { return a.rows == b.rows; }
};

struct Metrics {
    double ise_alpha = 0.0;
    double iae_alpha = 0.0;
    double ise_x = 0.0;
    double iae_x = 0.0;
    long constraint_violations = 0;  ///< samples with a commanded input or alpha outside its bound
    long alpha_excursions = 0;       ///< samples with alpha outside [0, pi]
    double final_error_x = 0.0;
    double final_error_alpha = 0.0;
    double alpha_peak = 0.0;
};

struct ScenarioResult {
    TrajectoryLog log;
    Metrics metrics;
    bool aborted = false;
    std::string error;
};

/// Trapezoidal ISE/IAE of the inclination and position errors over the whole log.
[[nodiscard]] inline Metrics ise_iae(const TrajectoryLog& log, const Reference& desired)
{
    Metrics m;
    if (log.rows.empty()) return m;
    for (std::size_t i = 1; i < log.rows.size(); ++i) {
        const LogRow& a = log.rows[i - 1];
        const LogRow& b = log.rows[i];
        const double h = b.t - a.t;
        const double ea0 = desired.alpha - a.alpha, ea1 = desired.alpha - b.alpha;
        const double ex0 = desired.x - a.x, ex1 = desired.x - b.x;
        m.ise_alpha += 0.5 * h * (ea0 * ea0 + ea1 * ea1);
        m.iae_alpha += 0.5 * h * (std::abs(ea0) + std::abs(ea1));
        m.ise_x += 0.5 * h * (ex0 * ex0 + ex1 * ex1);
        m.iae_x += 0.5 * h * (std::abs(ex0) + std::abs(ex1));
    }
    const LogRow& last = log.rows.back();
    m.final_error_x = desired.x - last.x;
    m.final_error_alpha = desired.alpha - last.alpha;
    return m;
}

/// ISE/IAE plus constraint bookkeeping against the scenario limits.
[[nodiscard]] inline Metrics compute_metrics(const TrajectoryLog& log, const ScenarioConfig& cfg)
{
    Metrics m = ise_iae(log, cfg.desired_ref);
    const AlphaRange range = attainable_alpha_range(cfg.params, cfg.limits);
    m.alpha_peak = log.rows.empty() ? 0.0 : log.rows.front().alpha;
    for (const LogRow& r : log.rows) {
        const bool inputs_ok = cfg.limits.admits({r.u1_unsat, r.u2_unsat, r.u3_unsat});
        if (!inputs_ok || !range.contains(r.alpha)) ++m.constraint_violations;
        if (r.alpha < 0.0 || r.alpha > kPi) ++m.alpha_excursions;
        m.alpha_peak = std::max(m.alpha_peak, r.alpha);
    }
    return m;
}

/**
 * Closed-loop run. The reference governor, when configured, updates the
 * applied reference every t_s starting at t = 0 from the initial (x, alpha);
 * otherwise the desired reference is applied as a step at t = 0.
 * A numerical blow-up ends the run and returns the log up to that point.
 */
[[nodiscard]] inline ScenarioResult run_scenario(const ScenarioConfig& cfg)
{
    cfg.validate();
    ScenarioResult res;
    const ClosedLoopModel model = cfg.model();
    ControllerState cs = make_controller_state(cfg.gains, cfg.limits, cfg.params, cfg.thrust_mode);

    const long steps = std::lround(cfg.t_end / cfg.dt);
    const long rg_every = cfg.rg ? std::lround(cfg.rg->t_s / cfg.dt) : 0;

    SystemState s = cfg.initial_state;
    Reference applied = cfg.rg ? Reference{s.x, s.alpha} : cfg.desired_ref;
    double c_star = 1.0;

    try {
        for (long k = 0; k <= steps; ++k) {
            const double t = static_cast<double>(k) * cfg.dt;
            if (cfg.rg && k % rg_every == 0 && k < steps) {
                const RGDecision d = rg_step(s, cs, applied, cfg.desired_ref, *cfg.rg, model, t);
                applied = d.applied;
                c_star = d.c;
                res.log.rg_decisions.push_back(d);
            }
            const ControlOutput out = compute_control(s, applied, cfg.gains, cfg.params, cfg.limits, cs, cfg.dt);
            if (k % cfg.log_decimation == 0) {
                res.log.rows.push_back({t,
                                        s.x,
                                        s.x_dot,
                                        s.alpha,
                                        s.alpha_dot,
                                        wrap_angle(s.beta),
                                        s.beta_dot,
                                        out.u.u1,
                                        out.u.u2,
                                        out.u.u3,
                                        out.u_unsat.u1,
                                        out.u_unsat.u2,
                                        out.u_unsat.u3,
                                        out.f_t,
                                        out.theta_d,
                                        wrap_angle(out.beta_d),
                                        applied.x,
                                        applied.alpha,
                                        c_star});
            }
            if (k == steps) break;
            s = step(s, out.u, cfg.params, cfg.dt);
            if (cfg.ground_contact) apply_ground_stop(s);
        }
    } catch (const NumericalError& e) {
        res.aborted = true;
        res.error = e.what();
    }
    res.metrics = compute_metrics(res.log, cfg);
    return res;
}

// ---- log I/O ---------------------------------------------------------------

[[nodiscard]] inline char delimiter_for(const std::string& format)
{
    if (format == "csv") return ',';
    if (format == "tsv") return '\t';
    throw ConfigError("unknown log format '" + format + "' (expected csv or tsv)");
}

inline void write_log(std::ostream& os, const TrajectoryLog& log, char delim = ',')
{
    for (std::size_t i = 0; i < kLogColumns.size(); ++i) os << (i ? std::string(1, delim) : "") << kLogColumns[i];
    os << '\n';
    char buf[32];
    for (const LogRow& r : log.rows) {
        const auto v = row_values(r);
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.9g", v[i]);
            if (i) os << delim;
            os << buf;
        }
        os << '\n';
    }
}

inline void export_log(const TrajectoryLog& log, const std::string& path, const std::string& format = "csv")
{
    const char delim = delimiter_for(format);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_log(os, log, delim);
    if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

[[nodiscard]] inline TrajectoryLog read_log(std::istream& is, char delim = ',')
{
    TrajectoryLog log;
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("log is empty");
    std::string expected;
    for (std::size_t i = 0; i < kLogColumns.size(); ++i) expected += (i ? std::string(1, delim) : "") + kLogColumns[i];
    if (line != expected) throw ConfigError("log header does not match the expected columns");

    long lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::array<double, 19> v{};
        std::size_t col = 0;
        std::size_t pos = 0;
        while (true) {
            const std::size_t next = line.find(delim, pos);
            const std::string cell = line.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
            if (col >= v.size()) throw ConfigError("log line " + std::to_string(lineno) + " has too many columns");
            char* end = nullptr;
            v[col++] = std::strtod(cell.c_str(), &end);
            if (cell.empty() || *end != '\0')
                throw ConfigError("log line " + std::to_string(lineno) + ": bad number '" + cell + "'");
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        if (col != v.size()) throw ConfigError("log line " + std::to_string(lineno) + " has too few columns");
        log.rows.push_back(row_from_values(v));
    }
    return log;
}

[[nodiscard]] inline TrajectoryLog parse_log(const std::string& path, const std::string& format = "csv")
{
    const char delim = delimiter_for(format);
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "' for reading");
    return read_log(is, delim);
}

}  // namespace coman
