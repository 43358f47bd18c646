#include <gtest/gtest.h>

#include <cmath>

#include "coman/equilibrium.hpp"
#include "coman/governor.hpp"

using namespace coman;

namespace {

ClosedLoopModel low_thrust_model()
{
    ClosedLoopModel m;
    m.limits.T_max = 0.85;
    m.mode = ThrustMode::Feedforward;
    m.ground_stop = true;
    return m;
}

const SystemState kStart{0.0, 0.0, kPi / 2.0, 0.0, kPi / 2.0, 0.0};
const Reference kDesired{0.5, 3.0 * kPi / 4.0};

RGConfig short_horizon()
{
    RGConfig cfg;
    cfg.t_h = 5.0;
    return cfg;
}

}  // namespace

TEST(RGConfig, Validation)
{
    EXPECT_TRUE(RGConfig{}.violations().empty());
    RGConfig c;
    c.dt = 0.5;
    EXPECT_FALSE(c.violations().empty());
    c = RGConfig{};
    c.bisection_iters = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = RGConfig{};
    c.margin_u = -0.1;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Governor, Blend)
{
    const Reference a{0.0, 1.0}, b{1.0, 2.0};
    EXPECT_EQ(blend(a, b, 0.0), a);
    EXPECT_EQ(blend(a, b, 1.0), b);
    const Reference m = blend(a, b, 0.25);
    EXPECT_DOUBLE_EQ(m.x, 0.25);
    EXPECT_DOUBLE_EQ(m.alpha, 1.25);
}

TEST(Governor, RestAtCurrentEquilibriumIsFeasible)
{
    const ClosedLoopModel m = low_thrust_model();
    const ControllerState cs = make_controller_state(m.gains, m.limits, m.params, m.mode);
    EXPECT_TRUE(predict_feasible(kStart, cs, {kStart.x, kStart.alpha}, short_horizon(), m));

    // a tilted rest on the attitude map
    const double a = 2.0;
    const SystemState s{0.3, 0.0, a, 0.0, desired_beta(a, m.gains, m.params, m.limits), 0.0};
    EXPECT_TRUE(predict_feasible(s, cs, {0.3, a}, short_horizon(), m));
}

TEST(Governor, DirectStepIsInfeasible)
{
    const ClosedLoopModel m = low_thrust_model();
    const ControllerState cs = make_controller_state(m.gains, m.limits, m.params, m.mode);
    EXPECT_FALSE(predict_feasible(kStart, cs, kDesired, RGConfig{}, m));
}

TEST(Governor, FullMarginLeavesNothingFeasible)
{
    const ClosedLoopModel m = low_thrust_model();
    const ControllerState cs = make_controller_state(m.gains, m.limits, m.params, m.mode);
    RGConfig cfg = short_horizon();
    cfg.margin_u = 1.0;
    EXPECT_FALSE(predict_feasible(kStart, cs, {kStart.x, kStart.alpha}, cfg, m));
}

TEST(Governor, AlphaConstraintToggle)
{
    // with plenty of thrust only the state constraint can reject a reference near the ground
    ClosedLoopModel m;
    m.mode = ThrustMode::Feedforward;
    const ControllerState cs = make_controller_state(m.gains, m.limits, m.params, m.mode);
    RGConfig cfg = short_horizon();
    cfg.margin_u = 0.0;
    cfg.alpha_margin = 0.5;
    const double a = kPi - 0.3;
    const SystemState s{0.0, 0.0, a, 0.0, desired_beta(a, m.gains, m.params, m.limits), 0.0};
    EXPECT_FALSE(predict_feasible(s, cs, {0.0, a}, cfg, m));
    cfg.enforce_alpha_range = false;
    EXPECT_TRUE(predict_feasible(s, cs, {0.0, a}, cfg, m));
}

TEST(Governor, SameReferenceGivesFullStep)
{
    const ClosedLoopModel m = low_thrust_model();
    const ControllerState cs = make_controller_state(m.gains, m.limits, m.params, m.mode);
    const Reference here{kStart.x, kStart.alpha};
    const RGDecision d = rg_step(kStart, cs, here, here, short_horizon(), m);
    EXPECT_EQ(d.c, 1.0);
    EXPECT_EQ(d.applied, here);
    EXPECT_EQ(d.predictions, 1);
    EXPECT_TRUE(d.applied_feasible);
}

TEST(Governor, FeasibleDesiredShortCircuits)
{
    const ClosedLoopModel m = low_thrust_model();
    const ControllerState cs = make_controller_state(m.gains, m.limits, m.params, m.mode);
    const Reference near{0.01, kStart.alpha + 0.01};
    const RGDecision d = rg_step(kStart, cs, {kStart.x, kStart.alpha}, near, short_horizon(), m);
    EXPECT_EQ(d.c, 1.0);
    EXPECT_EQ(d.predictions, 1);
    EXPECT_EQ(d.applied, near);
}

TEST(Governor, BisectionIsConservativeAndTight)
{
    const ClosedLoopModel m = low_thrust_model();
    const ControllerState cs = make_controller_state(m.gains, m.limits, m.params, m.mode);
    const RGConfig cfg;
    const Reference here{kStart.x, kStart.alpha};
    const RGDecision d = rg_step(kStart, cs, here, kDesired, cfg, m);
    ASSERT_TRUE(d.applied_feasible);
    EXPECT_GT(d.c, 0.0);
    EXPECT_LT(d.c, 1.0);
    EXPECT_EQ(d.predictions, 2 + cfg.bisection_iters);
    EXPECT_TRUE(predict_feasible(kStart, cs, d.applied, cfg, m));
    const double step = std::ldexp(1.0, -cfg.bisection_iters);
    EXPECT_FALSE(predict_feasible(kStart, cs, blend(here, kDesired, d.c + step), cfg, m));
}

TEST(Governor, InfeasibleAppliedReferenceIsHeld)
{
    const ClosedLoopModel m = low_thrust_model();
    const ControllerState cs = make_controller_state(m.gains, m.limits, m.params, m.mode);
    // a reference outside the attainable inclinations cannot be held
    const Reference bad{0.0, 2.6};
    const RGDecision d = rg_step(kStart, cs, bad, kDesired, short_horizon(), m);
    EXPECT_FALSE(d.applied_feasible);
    EXPECT_EQ(d.c, 0.0);
    EXPECT_EQ(d.applied, bad);
}

TEST(Governor, PredictionDoesNotTouchCallerState)
{
    const ClosedLoopModel m = low_thrust_model();
    ControlGains g = m.gains;
    g.k_i = 0.01;
    ClosedLoopModel mi = m;
    mi.gains = g;
    ControllerState cs = make_controller_state(g, m.limits, m.params, m.mode);
    cs.integral_alpha = 0.1;
    const ControllerState before = cs;
    (void)predict_feasible(kStart, cs, kDesired, short_horizon(), mi);
    EXPECT_EQ(cs.integral_alpha, before.integral_alpha);
}
