#include "drslip/planner.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "drslip/oracle_backend.hpp"

namespace drslip {
namespace {

constexpr double kPi = std::numbers::pi;
const ModelParams kModel{0.42, 9.81, 25.0};

SurfaceMotion drs1() { return surface_preset("DRS1"); }

TEST(Gait, PresetsMatchTheTable) {
    const GaitParams g1 = gait_preset("G1"), g2 = gait_preset("G2");
    EXPECT_EQ(g1.gait_period, 2.0);
    EXPECT_EQ(g1.avg_velocity, 0.05);
    EXPECT_EQ(g1.step_length, 0.10);
    EXPECT_EQ(g1.max_step_height, 0.05);
    EXPECT_EQ(g2.gait_period, 2.5);
    EXPECT_EQ(g2.avg_velocity, 0.06);
    EXPECT_EQ(g2.step_length, 0.15);
    EXPECT_EQ(g2.max_step_height, 0.04);
    EXPECT_EQ(g1.friction_coefficient, 0.5);
    EXPECT_THROW(gait_preset("G3"), ConfigError);
}

TEST(Gait, ValidationRejectsInconsistentInputs) {
    GaitParams g;
    g.avg_velocity = 0.06;  // 0.06 * 2 != 0.10
    EXPECT_THROW(g.validate(), ConfigError);
    g = GaitParams{};
    g.contact_sequence = {Foot::FR, Foot::FR, Foot::FL, Foot::RR};
    EXPECT_THROW(g.validate(), ConfigError);
    EXPECT_THROW(foot_from_string("XX"), ConfigError);
    EXPECT_EQ(foot_from_string("RL"), Foot::RL);
}

TEST(Gait, SurfacePeriodMustBeAMultipleOfTheGaitPeriod) {
    EXPECT_NO_THROW(check_commensurate(gait_preset("G1"), drs1()));
    EXPECT_NO_THROW(check_commensurate(gait_preset("G2"), surface_preset("DRS3")));   // 2.5 s
    EXPECT_THROW(check_commensurate(gait_preset("G2"), drs1()), ConfigError);          // 2 / 2.5
    EXPECT_THROW(check_commensurate(gait_preset("G1"), surface_preset("DRS3")), ConfigError);
    EXPECT_NO_THROW(check_commensurate(gait_preset("G1"), VerticalSinusoid{0.1, kPi / 2, 0.0}));  // 4 s
}

TEST(Phases, SupportScheduleForG1) {
    const auto ph = build_phases(gait_preset("G1"), drs1());
    const Foot order[] = {Foot::FR, Foot::RL, Foot::FL, Foot::RR};
    for (int k = 0; k < 4; ++k) {
        EXPECT_EQ(ph[k].swing, order[k]);
        EXPECT_EQ(ph[k].support_mask, kAllFeetMask & ~foot_bit(order[k]));
        EXPECT_DOUBLE_EQ(ph[k].t_start, 0.5 * k);
        ASSERT_EQ(ph[k].polygon.size(), 3u);
        EXPECT_GT(polygon_area(ph[k].polygon), 0.0);
        const Vec2 lift = ph[k].feet[static_cast<int>(order[k])];
        EXPECT_DOUBLE_EQ(ph[k].landing.x, lift.x + 0.10);
        EXPECT_EQ(ph[k].landing.y, lift.y);
    }
    // Phase 1: FL, RR, RL stand -> centroid of (0.2,0.15), (-0.2,-0.15), (-0.2,0.15).
    EXPECT_NEAR(ph[0].support_point.x, -0.2 / 3.0, 1e-15);
    EXPECT_NEAR(ph[0].support_point.y, 0.05, 1e-15);
    // Phase 2 sees FR already moved forward.
    EXPECT_DOUBLE_EQ(ph[1].feet[static_cast<int>(Foot::FR)].x, 0.3);
}

TEST(Phases, DegeneratePolygonIsInfeasible) {
    GaitParams g;
    g.initial_footholds = {Vec2{0.2, 0.0}, Vec2{0.1, 0.0}, Vec2{-0.2, 0.0}, Vec2{-0.1, 0.0}};
    EXPECT_THROW(build_phases(g, drs1()), InfeasiblePlanError);
}

TEST(Phases, PitchingDynamicsDependOnSupportPoint) {
    const SurfaceMotion m = surface_preset("DRS2");
    const auto ph = build_phases(gait_preset("G1"), m);
    const auto& p = std::get<Pitching>(m);
    for (int k = 0; k < 4; ++k) {
        const double r = p.reference_radius + ph[k].support_point.x;
        EXPECT_NEAR(ph[k].dynamics.amplitude, r * std::sin(p.pitch_amplitude), 1e-15);
        EXPECT_NEAR(ph[k].dynamics.omega, 2 * kPi * 0.5, 1e-15);
    }
}

TEST(BuildNlp, DimensionsAndCounts) {
    for (int n_check : {2, 10, 25}) {
        PlannerOptions o;
        o.n_check = n_check;
        const PlannerNlp nlp = build_nlp(gait_preset("G1"), drs1(), kModel, o);
        EXPECT_EQ(nlp.problem.n, 16);
        EXPECT_EQ(nlp.problem.n_eq, 10);
        EXPECT_EQ(nlp.problem.n_in, 4 * n_check * 2);
        EXPECT_EQ(nlp.problem.inequality_count(), 4 * n_check * 2 + 32);
    }
}

TEST(BuildNlp, ZeroOffsetsGiveHandComputedResiduals) {
    // With the CoM resting on each support point, the offsets stay zero:
    // friction rows read -mu^2, polygon rows the centroid's edge distance,
    // and the continuity rows the jumps between support points.
    const GaitParams gait = gait_preset("G1");
    const PlannerNlp nlp = build_nlp(gait, drs1(), kModel);
    std::vector<double> h(10), g(nlp.problem.n_in);
    const std::vector<double> zero(16, 0.0);
    nlp.problem.constraints(zero, h, g);
    const auto& ph = nlp.phases();
    for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(h[2 * k], ph[k].support_point.x - ph[k + 1].support_point.x, 1e-15);
        EXPECT_NEAR(h[2 * k + 1], ph[k].support_point.y - ph[k + 1].support_point.y, 1e-15);
    }
    EXPECT_NEAR(h[6], ph[3].support_point.x - ph[0].support_point.x - gait.stride(), 1e-15);
    EXPECT_NEAR(h[8], (ph[3].support_point.x - ph[0].support_point.x) / gait.gait_period - gait.avg_velocity, 1e-15);
    EXPECT_NEAR(h[9], (ph[3].support_point.y - ph[0].support_point.y) / gait.gait_period, 1e-15);
    const int m = 10;
    for (int k = 0; k < 4; ++k) {
        const double dist = polygon_signed_distance(ph[k].polygon, ph[k].support_point);
        for (int i = 0; i < m; ++i) {
            EXPECT_NEAR(g[2 * (k * m + i)], -0.25, 1e-15);
            EXPECT_NEAR(g[2 * (k * m + i) + 1], dist, 1e-15);
        }
    }
}

TEST(Backends, AnalyticAgreesWithIntegrator) {
    const GaitParams gait = gait_preset("G1");
    const auto phases = build_phases(gait, drs1());
    const ModelParams pm = planning_model(gait, kModel);
    const AnalyticBackend a(phases, pm);
    const IntegratorBackend n(phases, pm, IntegratorConfig{1e-12, 1e-14});
    const PhaseInitial ic{{0.03, -0.05}, {-0.02, 0.04}};
    for (int k = 0; k < 4; ++k) {
        std::vector<double> xa(11), ya(11), xn(11), yn(11);
        a.propagate(k, phases[k].t_start, 0.05, ic, xa, ya);
        n.propagate(k, phases[k].t_start, 0.05, ic, xn, yn);
        EXPECT_NEAR(xa[0], 0.03, 1e-14);
        EXPECT_NEAR(ya[0], -0.02, 1e-14);
        for (int i = 0; i < 11; ++i) {
            EXPECT_NEAR(xa[i], xn[i], 1e-10);
            EXPECT_NEAR(ya[i], yn[i], 1e-10);
        }
    }
}

class PlannedG1 : public ::testing::Test {
protected:
    static void SetUpTestSuite() { outcome_ = new PlanOutcome(plan_gait(gait_preset("G1"), drs1(), kModel)); }
    static void TearDownTestSuite() { delete outcome_; }
    static PlanOutcome* outcome_;
};
PlanOutcome* PlannedG1::outcome_ = nullptr;

TEST_F(PlannedG1, SolverConverges) {
    EXPECT_TRUE(outcome_->nlp.converged);
    EXPECT_LE(outcome_->nlp.violation, 1e-6);
}

TEST_F(PlannedG1, PostCheckPasses) {
    const FeasibilityReport r = check_feasibility(outcome_->com, 100, 7);
    EXPECT_EQ(r.samples, 400);
    EXPECT_LE(r.max_friction_ratio, 0.5);
    EXPECT_LE(r.max_polygon_distance, 1e-6);
    EXPECT_LE(r.max_continuity_error, 1e-6);
    EXPECT_NEAR(r.average_velocity.x, 0.05, 1e-6);
    EXPECT_NEAR(r.average_velocity.y, 0.0, 1e-6);
    EXPECT_TRUE(r.ok(gait_preset("G1")));
}

TEST_F(PlannedG1, VelocityIsTheDerivativeOfPosition) {
    const CoMPlan& c = outcome_->com;
    for (double t : {0.1, 0.7, 1.3, 1.9}) {
        const double e = 1e-6;
        const Vec3 p = c.com(t + e), m = c.com(t - e);
        const Vec2 v = c.velocity(t);
        EXPECT_NEAR(v.x, (p.x - m.x) / (2 * e), 1e-7);
        EXPECT_NEAR(v.y, (p.y - m.y) / (2 * e), 1e-7);
    }
}

TEST_F(PlannedG1, BaseHeightFollowsSurface) {
    const CoMPlan& c = outcome_->com;
    for (double t : {0.0, 0.3, 1.1}) EXPECT_NEAR(c.com(t).z, 0.42 + 0.10 * std::sin(kPi * t), 1e-15);
}

TEST_F(PlannedG1, SwingApexIsStepHeight) {
    const FullBodyPlan& b = outcome_->body;
    for (const SwingSegment& sw : b.swings) {
        const double tm = 0.5 * (sw.t_lift + sw.t_land);
        const Vec3 p = b.foot_position(sw.foot, tm);
        EXPECT_NEAR(p.z - surface_height_at(b.com.motion, p.x, tm), 0.05, 1e-12);
        const Vec3 lift = b.foot_position(sw.foot, sw.t_lift);
        EXPECT_NEAR(lift.z - surface_height_at(b.com.motion, lift.x, sw.t_lift), 0.0, 1e-15);
    }
}

TEST_F(PlannedG1, FourLegIntervalsAtTheEdgeSharingSwitches) {
    const FullBodyPlan& b = outcome_->body;
    ASSERT_EQ(b.four_leg_intervals.size(), 2u);
    EXPECT_NEAR(b.four_leg_intervals[0].first, 0.4, 1e-15);
    EXPECT_NEAR(b.four_leg_intervals[0].second, 0.5, 1e-15);
    EXPECT_NEAR(b.four_leg_intervals[1].first, 1.4, 1e-15);
    EXPECT_EQ(b.support_mask(0.45), kAllFeetMask);
    EXPECT_EQ(b.support_mask(0.2), kAllFeetMask & ~foot_bit(Foot::FR));
    EXPECT_EQ(b.support_mask(0.9), kAllFeetMask & ~foot_bit(Foot::RL));
}

TEST_F(PlannedG1, SampledRows) {
    const auto rows = sample_plan(outcome_->body, 0.01);
    ASSERT_EQ(rows.size(), 201u);
    EXPECT_EQ(rows.front().phase_id, 1);
    EXPECT_EQ(rows.back().phase_id, 4);
    EXPECT_NEAR(rows.back().t, 2.0, 1e-12);
    for (const PlanRow& r : rows) {
        EXPECT_GE(r.phase_id, 1);
        EXPECT_LE(r.phase_id, 4);
        EXPECT_EQ(r.pitch, 0.0);
    }
    EXPECT_EQ(sample_plan(outcome_->body, 0.3).size(), 7u);
    EXPECT_THROW(sample_plan(outcome_->body, 0.0), ConfigError);
}

TEST(Planner, G2OnVerticalEquivalentOfDrs3) {
    const SurfaceMotion m = as_vertical_sinusoid(surface_preset("DRS3"));
    const PlanOutcome out = plan_gait(gait_preset("G2"), m, kModel);
    const FeasibilityReport r = check_feasibility(out.com);
    EXPECT_TRUE(r.ok(gait_preset("G2"))) << r.max_friction_ratio << " " << r.max_polygon_distance;
}

TEST(Planner, PitchingBaseFollowsSurfacePitch) {
    const SurfaceMotion m = surface_preset("DRS2");
    const PlanOutcome out = plan_gait(gait_preset("G1"), m, kModel);
    for (double t : {0.2, 0.9}) EXPECT_DOUBLE_EQ(out.body.base_pitch(t), std::get<Pitching>(m).pitch(t));
}

TEST(Planner, Deterministic) {
    const PlanOutcome a = plan_gait(gait_preset("G1"), drs1(), kModel);
    const PlanOutcome b = plan_gait(gait_preset("G1"), drs1(), kModel);
    EXPECT_EQ(a.nlp.x, b.nlp.x);
    EXPECT_EQ(a.nlp.evaluations, b.nlp.evaluations);
}

TEST(Planner, IntegratorBackendSolvesTheSameProblem) {
    const GaitParams gait = gait_preset("G1");
    const PlannerNlp na = build_nlp(gait, drs1(), kModel);
    const PlannerNlp nn = build_nlp(gait, drs1(), kModel, {}, make_integrator_backend(gait, drs1(), kModel));
    const std::vector<double> x0(16, 0.0);
    const NlpResult ra = solve_nlp(na.problem, x0), rn = solve_nlp(nn.problem, x0);
    EXPECT_LE(constraint_violation(nn, ra.x), 1e-5);
    EXPECT_LE(constraint_violation(na, rn.x), 1e-5);
}

}  // namespace
}  // namespace drslip
