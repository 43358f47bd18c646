#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <cstring>
#include <limits>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "coman/scenario.hpp"

using namespace coman;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("coman_test_" + name)).string();
}

ScenarioConfig short_run(const std::string& name, double t_end = 2.0)
{
    ScenarioConfig c = builtin_scenario(name);
    c.t_end = t_end;
    return c;
}

}  // namespace

TEST(Scenarios, BuiltinSet)
{
    const auto all = builtin_scenarios();
    std::set<std::string> names;
    for (auto& s : all) {
        names.insert(s.name);
        EXPECT_TRUE(s.violations().empty()) << s.name;
        EXPECT_EQ(s.initial_state, (SystemState{0.0, 0.0, kPi / 2.0, 0.0, kPi / 2.0, 0.0}));
        EXPECT_DOUBLE_EQ(s.desired_ref.x, 0.5);
        EXPECT_DOUBLE_EQ(s.gains.k_px, 20.0);
        EXPECT_DOUBLE_EQ(s.gains.k_vbeta, 2.85);
        EXPECT_DOUBLE_EQ(s.params.zeta_x, 1.5);
    }
    EXPECT_EQ(names, (std::set<std::string>{"no-feedforward", "feedforward", "no-rg", "rg", "experiment"}));

    EXPECT_EQ(builtin_scenario("no-feedforward").thrust_mode, ThrustMode::DesiredAngle);
    EXPECT_EQ(builtin_scenario("feedforward").thrust_mode, ThrustMode::Feedforward);
    const ScenarioConfig rg = builtin_scenario("rg");
    ASSERT_TRUE(rg.rg.has_value());
    EXPECT_DOUBLE_EQ(rg.limits.T_max, 0.85);
    EXPECT_DOUBLE_EQ(rg.rg->t_s, 0.2);
    EXPECT_DOUBLE_EQ(rg.rg->t_h, 15.0);
    EXPECT_FALSE(builtin_scenario("no-rg").rg.has_value());
    EXPECT_DOUBLE_EQ(builtin_scenario("no-rg").limits.T_max, 0.85);
    const ScenarioConfig exp = builtin_scenario("experiment");
    EXPECT_DOUBLE_EQ(exp.desired_ref.alpha, kPi / 2.0 + kPi / 9.0);
    EXPECT_DOUBLE_EQ(exp.gains.k_i, 0.001);
    EXPECT_THROW((void)builtin_scenario("nope"), ConfigError);
}

TEST(Harness, LogShapeAndLimits)
{
    const ScenarioResult r = run_scenario(short_run("feedforward"));
    ASSERT_FALSE(r.aborted);
    const ScenarioConfig c = short_run("feedforward");
    ASSERT_EQ(r.log.rows.size(), static_cast<std::size_t>(std::lround(c.t_end / (c.dt * c.log_decimation))) + 1);
    const double h = c.dt * c.log_decimation;
    for (std::size_t i = 0; i < r.log.rows.size(); ++i) {
        const LogRow& row = r.log.rows[i];
        EXPECT_DOUBLE_EQ(row.t, static_cast<double>(i * c.log_decimation) * c.dt);
        if (i) EXPECT_NEAR(row.t - r.log.rows[i - 1].t, h, 1e-12);
        EXPECT_TRUE(c.limits.admits({row.u1, row.u2, row.u3}));
        EXPECT_GE(row.beta, -kPi);
        EXPECT_LT(row.beta, kPi);
    }
    EXPECT_EQ(r.log.rows.back().t, c.t_end);
}

TEST(Harness, Deterministic)
{
    const ScenarioConfig c = short_run("rg", 3.0);
    const ScenarioResult a = run_scenario(c), b = run_scenario(c);
    ASSERT_EQ(a.log.rows.size(), b.log.rows.size());
    EXPECT_EQ(std::memcmp(a.log.rows.data(), b.log.rows.data(), a.log.rows.size() * sizeof(LogRow)), 0);
}

TEST(Harness, RestStaysAtRest)
{
    ScenarioConfig c;
    c.t_end = 3.0;
    const double a = 2.0;
    c.initial_state = {0.5, 0.0, a, 0.0, desired_beta(a, c.gains, c.params, c.limits), 0.0};
    c.desired_ref = {0.5, a};
    const ScenarioResult r = run_scenario(c);
    for (const LogRow& row : r.log.rows) {
        EXPECT_NEAR(row.x, 0.5, 1e-9);
        EXPECT_NEAR(row.alpha, a, 1e-9);
        EXPECT_NEAR(row.beta, c.initial_state.beta, 1e-9);
    }
    EXPECT_NEAR(r.metrics.ise_alpha, 0.0, 1e-15);
}

TEST(Harness, IseIaeTrapezoid)
{
    TrajectoryLog log;
    for (int i = 0; i <= 10; ++i) {
        LogRow r;
        r.t = 0.1 * i;
        r.alpha = 1.0 - r.t;  // error e = t for desired alpha 1
        r.x = 0.0;
        log.rows.push_back(r);
    }
    const Metrics m = ise_iae(log, {0.0, 1.0});
    EXPECT_NEAR(m.iae_alpha, 0.5, 1e-12);
    // trapezoid on t^2 over [0, 1] with h = 0.1: 1/3 + h^2/6
    EXPECT_NEAR(m.ise_alpha, 1.0 / 3.0 + 0.01 / 6.0, 1e-12);
    EXPECT_EQ(m.ise_x, 0.0);
    EXPECT_NEAR(m.final_error_alpha, 1.0, 1e-12);
}

TEST(Harness, ZeroErrorLogHasZeroIndices)
{
    TrajectoryLog log;
    for (int i = 0; i < 5; ++i) log.rows.push_back({.t = 0.5 * i, .x = 0.5, .alpha = 2.0});
    const Metrics m = ise_iae(log, {0.5, 2.0});
    EXPECT_EQ(m.ise_alpha, 0.0);
    EXPECT_EQ(m.iae_alpha, 0.0);
    EXPECT_EQ(m.iae_x, 0.0);
}

TEST(Harness, FeedforwardConverges)
{
    const ScenarioResult r = run_scenario(builtin_scenario("feedforward"));
    for (const LogRow& row : r.log.rows) {
        if (row.t < 15.0) continue;
        EXPECT_LT(std::abs(row.alpha - 3.0 * kPi / 4.0), 0.01);
        EXPECT_LT(std::abs(row.x - 0.5), 0.01);
    }
}

TEST(Harness, NoGovernorFallsToTheGround)
{
    const ScenarioConfig c = builtin_scenario("no-rg");
    const ScenarioResult r = run_scenario(c);
    const AlphaRange range = attainable_alpha_range(c.params, c.limits);
    EXPECT_GT(r.metrics.alpha_peak, range.alpha_max);
    EXPECT_LT(std::abs(r.log.rows.back().alpha - kPi), 0.1);
    EXPECT_GT(r.metrics.constraint_violations, 0);
}

TEST(Harness, GovernorKeepsInclinationAttainable)
{
    const ScenarioConfig c = builtin_scenario("rg");
    const ScenarioResult r = run_scenario(c);
    const AlphaRange range = attainable_alpha_range(c.params, c.limits);
    for (const LogRow& row : r.log.rows) {
        ASSERT_GT(row.alpha, range.alpha_min);
        ASSERT_LT(row.alpha, range.alpha_max);
    }
    EXPECT_EQ(r.metrics.constraint_violations, 0);

    // the applied reference approaches the desired one monotonically
    double prev = std::numeric_limits<double>::infinity();
    double reached = -1.0;
    for (const RGDecision& d : r.log.rg_decisions) {
        EXPECT_TRUE(d.applied_feasible);
        const double dist = std::hypot(d.applied.x - c.desired_ref.x, d.applied.alpha - c.desired_ref.alpha);
        EXPECT_LE(dist, prev + 1e-15);
        prev = dist;
        if (reached < 0.0 && dist < 1e-3) reached = d.t;
    }
    EXPECT_GE(reached, 0.0);
    EXPECT_LT(reached, 60.0);
    EXPECT_LT(r.log.rg_decisions.front().c, 1.0);
}

TEST(Harness, BlowUpReturnsPartialLog)
{
    ScenarioConfig c = builtin_scenario("feedforward");
    c.limits.tau_max = 1e307;
    c.limits.F_max = 1e308;
    c.dt = 0.01;
    c.log_decimation = 1;
    const ScenarioResult r = run_scenario(c);
    EXPECT_TRUE(r.aborted);
    EXPECT_FALSE(r.error.empty());
    EXPECT_GT(r.log.rows.size(), 0u);
    EXPECT_LT(r.log.rows.size(), 2001u);
}

TEST(LogIo, RoundTripIsByteIdentical)
{
    const ScenarioResult r = run_scenario(short_run("no-rg", 1.0));
    const std::string p1 = temp_path("a.csv"), p2 = temp_path("b.csv");
    export_log(r.log, p1);
    const TrajectoryLog back = parse_log(p1);
    ASSERT_EQ(back.rows.size(), r.log.rows.size());
    export_log(back, p2);
    EXPECT_EQ(slurp(p1), slurp(p2));

    const std::string t1 = temp_path("a.tsv");
    export_log(r.log, t1, "tsv");
    EXPECT_EQ(parse_log(t1, "tsv").rows.size(), r.log.rows.size());
    std::remove(p1.c_str());
    std::remove(p2.c_str());
    std::remove(t1.c_str());
}

TEST(LogIo, HeaderAndColumns)
{
    std::ostringstream os;
    write_log(os, TrajectoryLog{});
    EXPECT_EQ(os.str(),
              "t,x,x_dot,alpha,alpha_dot,beta,beta_dot,u1,u2,u3,u1_unsat,u2_unsat,u3_unsat,f_t,theta_d,beta_d,"
              "x_a,alpha_a,c_star\n");
    EXPECT_EQ(kLogColumns.size(), 19u);

    TrajectoryLog one;
    one.rows.push_back({});
    std::ostringstream os2;
    write_log(os2, one);
    const std::string body = os2.str().substr(os2.str().find('\n') + 1);
    EXPECT_EQ(std::count(body.begin(), body.end(), ','), 18);
}

TEST(LogIo, RejectsMalformedInput)
{
    std::istringstream bad_header("t,x\n");
    EXPECT_THROW((void)read_log(bad_header), ConfigError);
    std::ostringstream os;
    write_log(os, TrajectoryLog{});
    std::istringstream short_row(os.str() + "1,2,3\n");
    EXPECT_THROW((void)read_log(short_row), ConfigError);
    std::istringstream bad_num(os.str() + "1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,zz\n");
    EXPECT_THROW((void)read_log(bad_num), ConfigError);
    EXPECT_THROW((void)parse_log("/nonexistent/dir/log.csv"), std::runtime_error);
    EXPECT_THROW((void)delimiter_for("json"), ConfigError);
}

TEST(Config, ParsesKeyValueFile)
{
    std::istringstream is(
        "# comment\n"
        "name = custom-run\n"
        "limits.T_max = 0.85   # reduced thrust\n"
        "\n"
        "thrust_mode = eq10\n"
        "desired_ref.alpha_d = 2.0\n"
        "rg.t_h = 10\n"
        "gains.k_i=0.002\n");
    ScenarioConfig c;
    read_config(is, c);
    EXPECT_EQ(c.name, "custom-run");
    EXPECT_DOUBLE_EQ(c.limits.T_max, 0.85);
    EXPECT_EQ(c.thrust_mode, ThrustMode::DesiredAngle);
    EXPECT_DOUBLE_EQ(c.desired_ref.alpha, 2.0);
    ASSERT_TRUE(c.rg.has_value());
    EXPECT_DOUBLE_EQ(c.rg->t_h, 10.0);
    EXPECT_DOUBLE_EQ(c.rg->t_s, 0.2);
    EXPECT_DOUBLE_EQ(c.gains.k_i, 0.002);
}

TEST(Config, UnknownKeyAndBadValueNameTheKey)
{
    ScenarioConfig c;
    std::istringstream unknown("params.mass = 3\n");
    try {
        read_config(unknown, c, "file.cfg");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("params.mass"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("file.cfg:1"), std::string::npos);
    }
    try {
        apply_override(c, "gains.k_px=fast");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("gains.k_px"), std::string::npos);
    }
    EXPECT_THROW(apply_override(c, "novalue"), ConfigError);
    EXPECT_THROW(apply_override(c, "thrust_mode=eq11"), ConfigError);
    EXPECT_THROW(apply_override(c, "ground_contact=maybe"), ConfigError);
    std::istringstream no_eq("just words\n");
    EXPECT_THROW(read_config(no_eq, c), ConfigError);
    EXPECT_THROW((void)load_config("/nonexistent/x.cfg"), ConfigError);
}

TEST(Config, WriteReadRoundTrip)
{
    for (const ScenarioConfig& s : builtin_scenarios()) {
        std::ostringstream os;
        write_config(os, s);
        std::istringstream is(os.str());
        ScenarioConfig back;
        read_config(is, back);
        std::ostringstream os2;
        write_config(os2, back);
        EXPECT_EQ(os.str(), os2.str()) << s.name;
        EXPECT_EQ(back.rg.has_value(), s.rg.has_value());
        EXPECT_EQ(back.initial_state, s.initial_state);
        EXPECT_EQ(back.desired_ref, s.desired_ref);
    }
}

TEST(Config, RgCanBeDisabled)
{
    ScenarioConfig c = builtin_scenario("rg");
    apply_override(c, "rg.enabled=false");
    EXPECT_FALSE(c.rg.has_value());
    apply_override(c, "rg.enabled = true");
    EXPECT_TRUE(c.rg.has_value());
}

TEST(Config, Validation)
{
    ScenarioConfig c = builtin_scenario("feedforward");
    EXPECT_TRUE(c.violations().empty());
    c.limits.F_max = 1.0;
    c.limits.T_max = 2.0;
    EXPECT_FALSE(c.violations().empty());

    c = builtin_scenario("rg");
    c.desired_ref.alpha = attainable_alpha_range(c.params, c.limits).alpha_max;
    ASSERT_FALSE(c.violations().empty());
    EXPECT_NE(c.violations()[0].find("desired_ref.alpha_d"), std::string::npos);
    c.validate_reference = false;
    EXPECT_TRUE(c.violations().empty());

    c = builtin_scenario("rg");
    c.rg->t_s = 0.2003;
    EXPECT_FALSE(c.violations().empty());
    EXPECT_THROW((void)run_scenario(c), ConfigError);
}
