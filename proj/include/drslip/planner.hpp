#pragma once

// Two-layer walking planner on a moving surface.
//
// Higher layer: a 16-variable NLP over the initial horizontal CoM offset and
// velocity of each of the four single-swing phases. Trajectories inside a
// phase come from a TrajectoryBackend; the default one evaluates the series
// solution, so no ODE is integrated while planning.
//
// Lower layer: base follows the CoM at constant height above the support
// point, swing feet follow degree-6 Bezier curves above the surface.

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "drslip/bezier.hpp"
#include "drslip/error.hpp"
#include "drslip/gait.hpp"
#include "drslip/geometry.hpp"
#include "drslip/mathieu.hpp"
#include "drslip/model.hpp"
#include "drslip/nlp.hpp"
#include "drslip/stats.hpp"

namespace drslip {

inline constexpr int kDecisionDim = 16;
inline constexpr int kEqualityCount = 10;

struct PlannerOptions {
    int n_check = 10;                 ///< constraint samples per phase, ends included
    double four_leg_fraction = 0.05;  ///< of the gait period, at switches 1->2 and 3->4
    double max_offset = 0.5;          ///< box bound on |x0|, |y0| [m]
    double max_speed = 2.0;           ///< box bound on |vx0|, |vy0| [m/s]
    SeriesConfig series;

    void validate() const {
        if (n_check < 2) throw ConfigError("planner: n_check must be >= 2");
        if (!(four_leg_fraction >= 0.0 && four_leg_fraction < 0.25))
            throw ConfigError("planner: four_leg_fraction must lie in [0, 0.25)");
        if (!(max_offset > 0.0) || !(max_speed > 0.0)) throw ConfigError("planner: box bounds must be > 0");
        series.validate();
    }
};

/// Initial conditions of phase k inside the decision vector.
struct PhaseInitial {
    PendulumState x, y;
};

inline PhaseInitial phase_initial(std::span<const double> alpha, int k) {
    const double* a = alpha.data() + 4 * k;
    return {{a[0], a[2]}, {a[1], a[3]}};
}

/// Propagates the horizontal CoM offset from a phase's support point.
class TrajectoryBackend {
public:
    virtual ~TrajectoryBackend() = default;
    virtual std::string_view name() const = 0;
    /// Offsets at t0 + i dt, i < xs.size(), from the state at t0.
    virtual void propagate(int phase, double t0, double dt, const PhaseInitial& ic, std::span<double> xs,
                           std::span<double> ys) const = 0;
};

inline ModelParams planning_model(const GaitParams& gait, const ModelParams& model) {
    return ModelParams{gait.z0, model.g, model.m};
}

/// Series solution per phase; the basis is built once, evaluated per call.
class AnalyticBackend final : public TrajectoryBackend {
public:
    AnalyticBackend(const std::array<PhaseSpec, 4>& phases, const ModelParams& model, const SeriesConfig& series = {}) {
        for (int k = 0; k < 4; ++k) bases_[k] = MathieuBasis(to_mathieu(model, phases[k].dynamics), series);
    }

    std::string_view name() const override { return "analytic"; }

    void propagate(int phase, double t0, double dt, const PhaseInitial& ic, std::span<double> xs,
                   std::span<double> ys) const override {
        const MathieuBasis& b = bases_.at(phase);
        const SolutionCoefficients cx = b.fit(ic.x.x, ic.x.v, t0);
        const SolutionCoefficients cy = b.fit(ic.y.x, ic.y.v, t0);
        b.evaluate_grid(t0, dt, xs, ys);  // y1 into xs, y2 into ys
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double y1 = xs[i], y2 = ys[i];
            xs[i] = cx.alpha1 * y1 + cx.alpha2 * y2;
            ys[i] = cy.alpha1 * y1 + cy.alpha2 * y2;
        }
    }

    const MathieuBasis& basis(int phase) const { return bases_.at(phase); }

private:
    std::array<MathieuBasis, 4> bases_;
};

/// Shared, immutable data behind one planning NLP.
struct PlannerContext {
    GaitParams gait;
    SurfaceMotion motion;
    ModelParams model;  ///< z0 taken from the gait
    PlannerOptions options;
    std::array<PhaseSpec, 4> phases;
    std::shared_ptr<const TrajectoryBackend> backend;

    double sample_dt() const { return gait.phase_duration() / (options.n_check - 1); }
};

struct PlannerNlp {
    std::shared_ptr<const PlannerContext> context;
    NlpProblem problem;

    const std::array<PhaseSpec, 4>& phases() const { return context->phases; }
};

namespace detail {

/// Equalities: position continuity at the four switches (the last one onto
/// the next cycle, shifted by one stride), then average velocity in x and y.
/// Inequalities per phase and sample: friction (squared ratio form), then
/// signed distance to the support polygon.
inline void planner_constraints(const PlannerContext& c, std::span<const double> alpha, std::span<double> h,
                                std::span<double> g) {
    const int m = c.options.n_check;
    const double dt = c.sample_dt();
    const double mu2 = c.gait.friction_coefficient * c.gait.friction_coefficient;
    const double inv_z02 = 1.0 / (c.gait.z0 * c.gait.z0);
    std::vector<double> xs(m), ys(m);
    std::array<Vec2, 4> end{};
    std::size_t gi = 0;
    for (int k = 0; k < 4; ++k) {
        const PhaseSpec& ph = c.phases[k];
        c.backend->propagate(k, ph.t_start, dt, phase_initial(alpha, k), xs, ys);
        for (int j = 0; j < m; ++j) {
            g[gi++] = (xs[j] * xs[j] + ys[j] * ys[j]) * inv_z02 - mu2;
            g[gi++] = polygon_signed_distance(ph.polygon, ph.support_point + Vec2{xs[j], ys[j]});
        }
        end[k] = ph.support_point + Vec2{xs[m - 1], ys[m - 1]};
    }
    const Vec2 start0 = c.phases[0].support_point + Vec2{alpha[0], alpha[1]};
    for (int k = 0; k < 4; ++k) {
        Vec2 next;
        if (k < 3) {
            next = c.phases[k + 1].support_point + Vec2{alpha[4 * (k + 1)], alpha[4 * (k + 1) + 1]};
        } else {
            next = start0 + Vec2{c.gait.stride(), 0.0};
        }
        h[2 * k] = end[k].x - next.x;
        h[2 * k + 1] = end[k].y - next.y;
    }
    h[8] = (end[3].x - start0.x) / c.gait.gait_period - c.gait.avg_velocity;
    h[9] = (end[3].y - start0.y) / c.gait.gait_period;
}

}  // namespace detail

/// Builds the planning NLP. Without an explicit backend the series solution
/// is used.
inline PlannerNlp build_nlp(const GaitParams& gait, const SurfaceMotion& motion, const ModelParams& model,
                            const PlannerOptions& options = {},
                            std::shared_ptr<const TrajectoryBackend> backend = nullptr) {
    options.validate();
    gait.validate();
    validate(motion);
    check_commensurate(gait, motion);
    auto ctx = std::make_shared<PlannerContext>();
    ctx->gait = gait;
    ctx->motion = motion;
    ctx->model = planning_model(gait, model);
    ctx->model.validate();
    ctx->options = options;
    ctx->phases = build_phases(gait, motion);
    ctx->backend = backend ? std::move(backend)
                           : std::make_shared<const AnalyticBackend>(ctx->phases, ctx->model, options.series);

    PlannerNlp nlp;
    nlp.context = ctx;
    NlpProblem& p = nlp.problem;
    p.n = kDecisionDim;
    p.n_eq = kEqualityCount;
    p.n_in = 4 * options.n_check * 2;
    for (int k = 0; k < 4; ++k) {
        for (double b : {options.max_offset, options.max_offset, options.max_speed, options.max_speed}) {
            p.lower.push_back(-b);
            p.upper.push_back(b);
        }
    }
    std::shared_ptr<const PlannerContext> shared = ctx;
    p.constraints = [shared](std::span<const double> x, std::span<double> h, std::span<double> g) {
        detail::planner_constraints(*shared, x, h, g);
    };
    return nlp;
}

/// Maximum violation of the NLP's constraints (bounds included) at alpha.
inline double constraint_violation(const PlannerNlp& nlp, std::span<const double> alpha) {
    long count = 0;
    detail::ConstraintEval ce(nlp.problem, &count);
    ce(alpha);
    return ce.violation();
}

struct CoMPhase {
    PhaseSpec spec;
    AnalyticSolution x, y;  ///< offsets from spec.support_point
};

struct CoMPlan {
    GaitParams gait;
    SurfaceMotion motion;
    std::array<CoMPhase, 4> phases;

    int phase_at(double t) const {
        const int k = static_cast<int>(std::floor(t / gait.phase_duration()));
        return std::clamp(k, 0, 3);
    }

    Vec2 offset(int k, double t) const { return {phases[k].x.evaluate(t).x, phases[k].y.evaluate(t).x}; }

    Vec2 horizontal(int k, double t) const { return phases[k].spec.support_point + offset(k, t); }

    /// World CoM; height is z0 above the surface under the support point.
    Vec3 com(double t) const {
        const int k = phase_at(t);
        const Vec2 p = horizontal(k, t);
        const double zs = surface_height_at(motion, phases[k].spec.support_point.x, t);
        return {p.x, p.y, zs + gait.z0};
    }

    Vec2 velocity(double t) const {
        const int k = phase_at(t);
        return {phases[k].x.evaluate(t).v, phases[k].y.evaluate(t).v};
    }

    /// |end of phase k - start of phase k+1| for k = 0..3, the last wrapping
    /// to the next cycle.
    std::array<double, 4> continuity_errors() const {
        std::array<double, 4> e{};
        for (int k = 0; k < 4; ++k) {
            const double t = phases[k].spec.t_end();
            const Vec2 a = horizontal(k, t);
            Vec2 b;
            if (k < 3) {
                b = horizontal(k + 1, t);
            } else {
                b = horizontal(0, 0.0) + Vec2{gait.stride(), 0.0};
            }
            e[k] = std::hypot(a.x - b.x, a.y - b.y);
        }
        return e;
    }

    Vec2 average_velocity() const {
        const Vec2 a = horizontal(0, 0.0), b = horizontal(3, gait.gait_period);
        return {(b.x - a.x) / gait.gait_period, (b.y - a.y) / gait.gait_period};
    }
};

/// Fits the per-phase series solutions to the decision vector.
inline CoMPlan com_plan(std::span<const double> alpha, const GaitParams& gait, const SurfaceMotion& motion,
                        const ModelParams& model, const SeriesConfig& series = {}) {
    if (alpha.size() != kDecisionDim) throw ConfigError("com_plan: decision vector must have 16 entries");
    for (double a : alpha)
        if (!std::isfinite(a)) throw ConfigError("com_plan: decision vector must be finite");
    const ModelParams pm = planning_model(gait, model);
    CoMPlan plan;
    plan.gait = gait;
    plan.motion = motion;
    const auto specs = build_phases(gait, motion);
    for (int k = 0; k < 4; ++k) {
        const MathieuBasis basis(to_mathieu(pm, specs[k].dynamics), series);
        const PhaseInitial ic = phase_initial(alpha, k);
        plan.phases[k] = {specs[k], AnalyticSolution::from_initial_state(basis, ic.x, specs[k].t_start),
                          AnalyticSolution::from_initial_state(basis, ic.y, specs[k].t_start)};
    }
    return plan;
}

struct SwingSegment {
    Foot foot = Foot::FR;
    int phase = 0;
    double t_lift = 0.0;
    double t_land = 0.0;
    BezierCurve curve;  ///< z is clearance above the surface
};

struct FullBodyPlan {
    CoMPlan com;
    std::array<SwingSegment, 4> swings;
    std::vector<std::pair<double, double>> four_leg_intervals;

    double horizon() const { return com.gait.gait_period; }
    int phase_at(double t) const { return com.phase_at(t); }

    Vec3 base_position(double t) const { return com.com(t); }
    double base_pitch(double t) const { return surface_pitch(com.motion, t); }

    bool in_swing(int k, double t) const { return t >= swings[k].t_lift && t < swings[k].t_land; }

    unsigned support_mask(double t) const {
        const int k = phase_at(t);
        return in_swing(k, t) ? kAllFeetMask & ~foot_bit(swings[k].foot) : kAllFeetMask;
    }

    Vec3 foot_position(Foot f, double t) const {
        const int k = phase_at(t);
        const SwingSegment& sw = swings[k];
        Vec2 p;
        double clearance = 0.0;
        if (f == sw.foot && in_swing(k, t)) {
            const Vec3 b = sw.curve((t - sw.t_lift) / (sw.t_land - sw.t_lift));
            p = {b.x, b.y};
            clearance = b.z;
        } else if (f == sw.foot && t >= sw.t_land) {
            p = com.phases[k].spec.landing;
        } else {
            p = com.phases[k].spec.feet[static_cast<int>(f)];
        }
        return {p.x, p.y, surface_height_at(com.motion, p.x, t) + clearance};
    }
};

/// Base and foot trajectories around a CoM plan.
inline FullBodyPlan lower_layer(const CoMPlan& com, const PlannerOptions& options = {}) {
    options.validate();
    FullBodyPlan plan;
    plan.com = com;
    const double T = com.gait.gait_period;
    for (int k = 0; k < 4; ++k) {
        const PhaseSpec& ph = com.phases[k].spec;
        SwingSegment& sw = plan.swings[k];
        sw.foot = ph.swing;
        sw.phase = k;
        sw.t_lift = ph.t_start;
        sw.t_land = ph.t_end();
        // Brief four-leg support before the edge-sharing switches 1->2 and 3->4.
        if ((k == 0 || k == 2) && options.four_leg_fraction > 0.0) {
            sw.t_land = ph.t_end() - options.four_leg_fraction * T;
            plan.four_leg_intervals.emplace_back(sw.t_land, ph.t_end());
        }
        sw.curve = swing_curve(ph.feet[static_cast<int>(ph.swing)], ph.landing, com.gait.max_step_height);
    }
    return plan;
}

struct PlanRow {
    double t = 0.0;
    Vec3 base;
    double pitch = 0.0;
    std::array<Vec3, 4> feet{};
    int phase_id = 1;  ///< 1..4
    unsigned support_mask = 0;
};

/// Rows at t = i dt for i = 0 .. floor(horizon / dt).
inline std::vector<PlanRow> sample_plan(const FullBodyPlan& plan, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("sample_plan: dt must be > 0");
    const auto count = static_cast<std::size_t>(std::floor(plan.horizon() / dt + 1e-9)) + 1;
    std::vector<PlanRow> rows(count);
    for (std::size_t i = 0; i < count; ++i) {
        PlanRow& r = rows[i];
        r.t = static_cast<double>(i) * dt;
        r.base = plan.base_position(r.t);
        r.pitch = plan.base_pitch(r.t);
        for (Foot f : kAllFeet) r.feet[static_cast<int>(f)] = plan.foot_position(f, r.t);
        r.phase_id = plan.phase_at(r.t) + 1;
        r.support_mask = plan.support_mask(r.t);
    }
    return rows;
}

struct FeasibilityReport {
    double max_friction_ratio = 0.0;
    double max_polygon_distance = -1.0;  ///< > 0 means outside
    double max_continuity_error = 0.0;
    Vec2 average_velocity;
    int samples = 0;

    bool ok(const GaitParams& gait, double tol = 1e-6) const {
        return max_friction_ratio <= gait.friction_coefficient + tol && max_polygon_distance <= tol &&
               max_continuity_error <= tol && std::abs(average_velocity.x - gait.avg_velocity) <= tol &&
               std::abs(average_velocity.y) <= tol;
    }
};

/// Post-check at uniformly random times inside each phase.
inline FeasibilityReport check_feasibility(const CoMPlan& plan, int samples_per_phase = 100,
                                           std::uint64_t seed = 1) {
    FeasibilityReport r;
    SplitMix64 rng(seed);
    for (int k = 0; k < 4; ++k) {
        const PhaseSpec& ph = plan.phases[k].spec;
        for (int i = 0; i < samples_per_phase; ++i) {
            const double t = rng.uniform(ph.t_start, ph.t_end());
            const Vec2 o = plan.offset(k, t);
            r.max_friction_ratio = std::max(r.max_friction_ratio, std::hypot(o.x, o.y) / plan.gait.z0);
            r.max_polygon_distance = std::max(r.max_polygon_distance, polygon_signed_distance(ph.polygon, ph.support_point + o));
            ++r.samples;
        }
    }
    for (double e : plan.continuity_errors()) r.max_continuity_error = std::max(r.max_continuity_error, e);
    r.average_velocity = plan.average_velocity();
    return r;
}

struct PlanOutcome {
    NlpResult nlp;
    CoMPlan com;
    FullBodyPlan body;
};

/// Full pipeline from zero initial guess: NLP, CoM plan, lower layer.
inline PlanOutcome plan_gait(const GaitParams& gait, const SurfaceMotion& motion, const ModelParams& model,
                             const PlannerOptions& options = {}, const NlpOptions& solver = {}) {
    const PlannerNlp nlp = build_nlp(gait, motion, model, options);
    const std::vector<double> x0(kDecisionDim, 0.0);
    PlanOutcome out;
    out.nlp = solve_nlp(nlp.problem, x0, solver);
    out.com = com_plan(out.nlp.x, gait, motion, model, options.series);
    out.body = lower_layer(out.com, options);
    return out;
}

}  // namespace drslip
