// coman: command-line front end for the cooperative UAV/UGV rod simulator.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "coman/coman.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kRuntime = 2, kValidation = 3 };

struct ConfigArgs {
    std::string scenario;
    std::string config_path;
    std::vector<std::string> overrides;
};

void add_config_options(CLI::App* cmd, ConfigArgs& a)
{
    cmd->add_option("--scenario", a.scenario, "built-in scenario to start from");
    cmd->add_option("--config", a.config_path, "key = value scenario file applied on top");
    cmd->add_option("--set", a.overrides, "override, key=value (repeatable)")->allow_extra_args(false);
}

// scenario, then file, then overrides
coman::ScenarioConfig resolve(const ConfigArgs& a)
{
    coman::ScenarioConfig cfg = a.scenario.empty() ? coman::ScenarioConfig{} : coman::builtin_scenario(a.scenario);
    if (!a.config_path.empty()) cfg = coman::load_config(a.config_path, cfg);
    for (const auto& o : a.overrides) coman::apply_override(cfg, o);
    return cfg;
}

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void print_metrics(const coman::ScenarioConfig& cfg, const coman::ScenarioResult& r)
{
    const auto& m = r.metrics;
    std::cout << "scenario = " << cfg.name << '\n'
              << "samples = " << r.log.rows.size() << '\n'
              << "ise_alpha = " << num(m.ise_alpha) << '\n'
              << "iae_alpha = " << num(m.iae_alpha) << '\n'
              << "ise_x = " << num(m.ise_x) << '\n'
              << "iae_x = " << num(m.iae_x) << '\n'
              << "final_error_x = " << num(m.final_error_x) << '\n'
              << "final_error_alpha = " << num(m.final_error_alpha) << '\n'
              << "alpha_peak = " << num(m.alpha_peak) << '\n'
              << "constraint_violations = " << m.constraint_violations << '\n'
              << "alpha_excursions = " << m.alpha_excursions << '\n';
    if (cfg.rg) std::cout << "rg_updates = " << r.log.rg_decisions.size() << '\n';
    std::cout << "aborted = " << (r.aborted ? "true" : "false") << '\n';
}

int cmd_simulate(const ConfigArgs& a, const std::string& out, const std::string& format)
{
    const coman::ScenarioConfig cfg = resolve(a);
    if (auto v = cfg.violations(); !v.empty()) {
        for (const auto& m : v) std::cerr << "error: " << m << '\n';
        return kValidation;
    }
    (void)coman::delimiter_for(format);
    const coman::ScenarioResult r = coman::run_scenario(cfg);
    if (!out.empty()) coman::export_log(r.log, out, format);
    print_metrics(cfg, r);
    if (r.aborted) {
        std::cerr << "error: run aborted: " << r.error << '\n';
        return kRuntime;
    }
    return kOk;
}

int cmd_scenarios(bool run, const std::string& show)
{
    if (!show.empty()) {
        coman::write_config(std::cout, coman::builtin_scenario(show));
        return kOk;
    }
    const auto all = coman::builtin_scenarios();
    if (!run) {
        for (const auto& s : all)
            std::cout << s.name << " thrust_mode=" << coman::to_string(s.thrust_mode) << " T_max=" << num(s.limits.T_max)
                      << " rg=" << (s.rg ? "on" : "off") << " t_end=" << num(s.t_end) << '\n';
        return kOk;
    }
    int rc = kOk;
    for (const auto& s : all) {
        const auto r = coman::run_scenario(s);
        std::cout << s.name << " ise_alpha=" << num(r.metrics.ise_alpha) << " iae_alpha=" << num(r.metrics.iae_alpha)
                  << " final_error_x=" << num(r.metrics.final_error_x)
                  << " final_error_alpha=" << num(r.metrics.final_error_alpha)
                  << " violations=" << r.metrics.constraint_violations << (r.aborted ? " aborted" : "") << '\n';
        if (r.aborted) rc = kRuntime;
    }
    return rc;
}

int cmd_equilibria(const ConfigArgs& a, std::optional<double> alpha_bar, std::optional<double> beta_bar)
{
    const coman::ScenarioConfig cfg = resolve(a);
    std::vector<std::string> errors = cfg.params.violations();
    for (auto& e : cfg.limits.violations()) errors.push_back(e);
    if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "error: " << e << '\n';
        return kValidation;
    }
    const auto range = coman::attainable_alpha_range(cfg.params, cfg.limits);
    std::cout << "T_max = " << num(cfg.limits.T_max) << '\n'
              << "M_a_g = " << num(cfg.params.apparent_mass() * cfg.params.g) << '\n';
    if (range.alpha_min == 0.0 && range.alpha_max == coman::kPi)
        std::cout << "alpha_range = [0, pi]\n";
    else
        std::cout << "alpha_range = [" << num(range.alpha_min) << ", " << num(range.alpha_max) << "]\n";
    std::cout << "alpha_min = " << num(range.alpha_min) << '\n' << "alpha_max = " << num(range.alpha_max) << '\n';
    if (!alpha_bar) return kOk;

    try {
        const auto br = coman::attainable_beta_range(*alpha_bar, cfg.params, cfg.limits);
        double b = 0.0;
        if (beta_bar)
            b = *beta_bar;
        else if (range.contains_open(*alpha_bar))
            b = coman::desired_beta(*alpha_bar, cfg.gains, cfg.params, cfg.limits);
        else
            b = 0.5 * (br.beta_min + br.beta_max);
        const auto u = coman::steady_state_inputs(*alpha_bar, b, cfg.params);
        std::cout << "alpha_bar = " << num(*alpha_bar) << '\n'
                  << "beta_range = [" << num(br.beta_min) << ", " << num(br.beta_max) << "]\n"
                  << "beta_bar = " << num(b) << '\n'
                  << "u1 = " << num(u.u1) << '\n'
                  << "u2 = " << num(u.u2) << '\n'
                  << "u3 = " << num(u.u3) << '\n'
                  << "u1_within_limit = " << (u.u1 >= 0.0 && u.u1 <= cfg.limits.T_max ? "true" : "false") << '\n';
    } catch (const coman::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    }
    return kOk;
}

int cmd_gains(const ConfigArgs& a, double xi)
{
    const coman::ScenarioConfig cfg = resolve(a);
    std::vector<std::string> errors = cfg.params.violations();
    for (auto& e : cfg.gains.violations()) errors.push_back(e);
    for (auto& e : cfg.limits.violations()) errors.push_back(e);
    if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "error: " << e << '\n';
        return kValidation;
    }
    try {
        const auto cert = coman::compute_certificate(cfg.gains, cfg.params, cfg.limits, xi);
        for (const auto& [k, v] : coman::certificate_entries(cert)) std::cout << k << " = " << v << '\n';
    } catch (const coman::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    }
    return kOk;
}

int cmd_validate(const ConfigArgs& a)
{
    const coman::ScenarioConfig cfg = resolve(a);
    const auto errors = cfg.violations();
    for (const auto& e : errors) std::cout << "error: " << e << '\n';
    for (const auto& w : cfg.gains.warnings()) std::cout << "warning: " << w << '\n';
    std::cout << (errors.empty() ? "ok" : "invalid") << '\n';
    return errors.empty() ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cooperative UAV/UGV rod manipulation: simulation, equilibria and stability constants"};
    app.require_subcommand(1);

    ConfigArgs sim_args, eq_args, gains_args, val_args;
    std::string out, format = "csv";
    auto* sim = app.add_subcommand("simulate", "run one scenario and print its metrics");
    add_config_options(sim, sim_args);
    sim->add_option("--out", out, "write the trajectory log here");
    sim->add_option("--format", format, "log format: csv or tsv");

    bool run_all = false;
    std::string show;
    auto* scen = app.add_subcommand("scenarios", "list, show or run the built-in scenarios");
    scen->add_flag("--run", run_all, "run every built-in scenario");
    scen->add_option("--show", show, "print one scenario as a config file");

    std::optional<double> alpha_bar, beta_bar;
    auto* eq = app.add_subcommand("equilibria", "attainable inclinations, attitudes and rest inputs");
    add_config_options(eq, eq_args);
    eq->add_option("--alpha-bar", alpha_bar, "query inclination [rad]");
    eq->add_option("--beta-bar", beta_bar, "query attitude [rad]");

    double xi = 0.1;
    auto* gains = app.add_subcommand("gains", "stability certificate for a gain set");
    add_config_options(gains, gains_args);
    gains->add_option("--xi", xi, "attitude restriction margin [rad]");

    auto* val = app.add_subcommand("validate", "check a configuration");
    add_config_options(val, val_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*sim) return cmd_simulate(sim_args, out, format);
        if (*scen) return cmd_scenarios(run_all, show);
        if (*eq) return cmd_equilibria(eq_args, alpha_bar, beta_bar);
        if (*gains) return cmd_gains(gains_args, xi);
        if (*val) return cmd_validate(val_args);
    } catch (const coman::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const coman::NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kUsage;
}
