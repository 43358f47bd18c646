#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "coman/harness.hpp"

namespace coman {

/// Named built-in runs: the four simulation cases plus the laboratory replica.
[[nodiscard]] inline std::vector<ScenarioConfig> builtin_scenarios()
{
    ScenarioConfig base;
    base.ground_contact = true;

    ScenarioConfig no_ff = base;
    no_ff.name = "no-feedforward";
    no_ff.thrust_mode = ThrustMode::DesiredAngle;

    ScenarioConfig ff = base;
    ff.name = "feedforward";

    ScenarioConfig no_rg = base;
    no_rg.name = "no-rg";
    no_rg.limits.T_max = 0.85;

    ScenarioConfig rg = no_rg;
    rg.name = "rg";
    rg.rg = RGConfig{};
    rg.t_end = 60.0;

    ScenarioConfig exp = base;
    exp.name = "experiment";
    exp.desired_ref.alpha = kPi / 2.0 + kPi / 9.0;
    exp.gains.k_i = 0.001;

    return {no_ff, ff, no_rg, rg, exp};
}

[[nodiscard]] inline ScenarioConfig builtin_scenario(const std::string& name)
{
    for (auto& s : builtin_scenarios())
        if (s.name == name) return s;
    std::string known;
    for (auto& s : builtin_scenarios()) known += (known.empty() ? "" : ", ") + s.name;
    throw ConfigError("unknown scenario '" + name + "' (known: " + known + ")");
}

namespace detail {

[[nodiscard]] inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[nodiscard]] inline double parse_double(const std::string& key, const std::string& v)
{
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || !std::isfinite(d)) throw ConfigError(key + ": expected a finite number, got '" + v + "'");
    return d;
}

[[nodiscard]] inline int parse_int(const std::string& key, const std::string& v)
{
    char* end = nullptr;
    const long n = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || *end != '\0') throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return static_cast<int>(n);
}

[[nodiscard]] inline bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

[[nodiscard]] inline std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Field {
    std::function<void(ScenarioConfig&, const std::string& key, const std::string& value)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

[[nodiscard]] inline RGConfig& rg_of(ScenarioConfig& c)
{
    if (!c.rg) c.rg = RGConfig{};
    return *c.rg;
}

[[nodiscard]] inline const std::vector<std::pair<std::string, Field>>& fields()
{
    using C = ScenarioConfig;
    static const std::vector<std::pair<std::string, Field>> table = [] {
        std::vector<std::pair<std::string, Field>> t;
        auto num = [&t](std::string key, auto member) {
            t.push_back({key,
                         {[member](C& c, const std::string& k, const std::string& v) { member(c) = parse_double(k, v); },
                          [member](const C& c) { return fmt(member(const_cast<C&>(c))); }}});
        };
        auto rg_num = [&t](std::string key, double RGConfig::*m) {
            t.push_back({key,
                         {[m](C& c, const std::string& k, const std::string& v) { rg_of(c).*m = parse_double(k, v); },
                          [m](const C& c) { return c.rg ? fmt((*c.rg).*m) : std::string(); }}});
        };

        t.push_back({"name", {[](C& c, const std::string&, const std::string& v) { c.name = v; },
                              [](const C& c) { return c.name; }}});
        t.push_back({"thrust_mode",
                     {[](C& c, const std::string& k, const std::string& v) {
                          if (v == "eq10")
                              c.thrust_mode = ThrustMode::DesiredAngle;
                          else if (v == "eq13")
                              c.thrust_mode = ThrustMode::Feedforward;
                          else
                              throw ConfigError(k + ": expected eq10 or eq13, got '" + v + "'");
                      },
                      [](const C& c) { return std::string(to_string(c.thrust_mode)); }}});

        num("params.m_a", [](C& c) -> double& { return c.params.m_a; });
        num("params.I_a", [](C& c) -> double& { return c.params.I_a; });
        num("params.m_s", [](C& c) -> double& { return c.params.m_s; });
        num("params.m_b", [](C& c) -> double& { return c.params.m_b; });
        num("params.I_b", [](C& c) -> double& { return c.params.I_b; });
        num("params.L", [](C& c) -> double& { return c.params.L; });
        num("params.d_G", [](C& c) -> double& { return c.params.d_G; });
        num("params.g", [](C& c) -> double& { return c.params.g; });
        num("params.zeta_x", [](C& c) -> double& { return c.params.zeta_x; });
        num("params.zeta_alpha", [](C& c) -> double& { return c.params.zeta_alpha; });
        num("params.zeta_beta", [](C& c) -> double& { return c.params.zeta_beta; });

        num("limits.T_max", [](C& c) -> double& { return c.limits.T_max; });
        num("limits.tau_max", [](C& c) -> double& { return c.limits.tau_max; });
        num("limits.F_max", [](C& c) -> double& { return c.limits.F_max; });

        num("gains.k_px", [](C& c) -> double& { return c.gains.k_px; });
        num("gains.k_vx", [](C& c) -> double& { return c.gains.k_vx; });
        num("gains.k_palpha", [](C& c) -> double& { return c.gains.k_palpha; });
        num("gains.k_valpha", [](C& c) -> double& { return c.gains.k_valpha; });
        num("gains.k_pbeta", [](C& c) -> double& { return c.gains.k_pbeta; });
        num("gains.k_vbeta", [](C& c) -> double& { return c.gains.k_vbeta; });
        num("gains.epsilon", [](C& c) -> double& { return c.gains.epsilon; });
        num("gains.k_i", [](C& c) -> double& { return c.gains.k_i; });
        num("gains.i_sat", [](C& c) -> double& { return c.gains.i_sat; });

        t.push_back({"rg.enabled",
                     {[](C& c, const std::string& k, const std::string& v) {
                          if (parse_bool(k, v))
                              (void)rg_of(c);
                          else
                              c.rg.reset();
                      },
                      [](const C& c) { return std::string(c.rg ? "true" : "false"); }}});
        rg_num("rg.t_s", &RGConfig::t_s);
        rg_num("rg.t_h", &RGConfig::t_h);
        rg_num("rg.dt", &RGConfig::dt);
        t.push_back({"rg.bisection_iters",
                     {[](C& c, const std::string& k, const std::string& v) { rg_of(c).bisection_iters = parse_int(k, v); },
                      [](const C& c) { return c.rg ? std::to_string(c.rg->bisection_iters) : std::string(); }}});
        rg_num("rg.margin_u", &RGConfig::margin_u);
        t.push_back({"rg.enforce_alpha_range",
                     {[](C& c, const std::string& k, const std::string& v) {
                          rg_of(c).enforce_alpha_range = parse_bool(k, v);
                      },
                      [](const C& c) {
                          return c.rg ? std::string(c.rg->enforce_alpha_range ? "true" : "false") : std::string();
                      }}});
        rg_num("rg.alpha_margin", &RGConfig::alpha_margin);

        num("initial_state.x", [](C& c) -> double& { return c.initial_state.x; });
        num("initial_state.x_dot", [](C& c) -> double& { return c.initial_state.x_dot; });
        num("initial_state.alpha", [](C& c) -> double& { return c.initial_state.alpha; });
        num("initial_state.alpha_dot", [](C& c) -> double& { return c.initial_state.alpha_dot; });
        num("initial_state.beta", [](C& c) -> double& { return c.initial_state.beta; });
        num("initial_state.beta_dot", [](C& c) -> double& { return c.initial_state.beta_dot; });
        num("desired_ref.x_d", [](C& c) -> double& { return c.desired_ref.x; });
        num("desired_ref.alpha_d", [](C& c) -> double& { return c.desired_ref.alpha; });

        num("t_end", [](C& c) -> double& { return c.t_end; });
        num("dt", [](C& c) -> double& { return c.dt; });
        t.push_back({"log_decimation",
                     {[](C& c, const std::string& k, const std::string& v) { c.log_decimation = parse_int(k, v); },
                      [](const C& c) { return std::to_string(c.log_decimation); }}});
        t.push_back({"ground_contact",
                     {[](C& c, const std::string& k, const std::string& v) { c.ground_contact = parse_bool(k, v); },
                      [](const C& c) { return std::string(c.ground_contact ? "true" : "false"); }}});
        t.push_back({"validate_reference",
                     {[](C& c, const std::string& k, const std::string& v) { c.validate_reference = parse_bool(k, v); },
                      [](const C& c) { return std::string(c.validate_reference ? "true" : "false"); }}});
        return t;
    }();
    return table;
}

}  // namespace detail

/// Every accepted configuration key, in canonical order.
[[nodiscard]] inline std::vector<std::string> config_keys()
{
    std::vector<std::string> out;
    for (auto& [k, f] : detail::fields()) out.push_back(k);
    return out;
}

/// Applies one dotted-key assignment. Unknown keys and malformed values throw ConfigError naming the key.
inline void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value)
{
    for (auto& [k, f] : detail::fields()) {
        if (k == key) {
            f.set(cfg, key, value);
            return;
        }
    }
    throw ConfigError("unknown key '" + key + "'");
}

/// Parses `key=value` as given on a command line.
inline void apply_override(ScenarioConfig& cfg, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form key=value");
    apply_setting(cfg, detail::trim(assignment.substr(0, eq)), detail::trim(assignment.substr(eq + 1)));
}

/// Reads `key = value` lines onto cfg. '#' starts a comment; blank lines are skipped.
inline void read_config(std::istream& is, ScenarioConfig& cfg, const std::string& origin = "<config>")
{
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        try {
            apply_setting(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

[[nodiscard]] inline ScenarioConfig load_config(const std::string& path, ScenarioConfig base = {})
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    read_config(is, base, path);
    return base;
}

/// Serializes cfg so that read_config reproduces it exactly.
inline void write_config(std::ostream& os, const ScenarioConfig& cfg)
{
    for (auto& [k, f] : detail::fields()) {
        const bool rg_key = k.rfind("rg.", 0) == 0 && k != "rg.enabled";
        if (rg_key && !cfg.rg) continue;
        os << k << " = " << f.get(cfg) << '\n';
    }
}

}  // namespace coman
