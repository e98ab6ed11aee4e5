#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>
#include <thread>

#include "cli.hpp"
#include "drslip/oracle_backend.hpp"

namespace drslip::cli {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_us(Clock::time_point since) {
    return std::chrono::duration<double, std::micro>(Clock::now() - since).count();
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json summary_json(const Summary& s) {
    return {{"count", s.count}, {"mean", s.mean}, {"sd", s.sd}, {"min", s.min}, {"max", s.max}};
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + path.string());
    return f;
}

void write_json(const std::filesystem::path& path, const json& j) {
    auto f = open_output(path);
    f << j.dump(2) << '\n';
}

void write_manifest(const RunOptions& o, const std::string& command, const std::vector<std::string>& outputs,
                    json timing) {
    json m;
    m["tool"] = kToolName;
    m["version"] = kToolVersion;
    m["command"] = command;
    m["seed"] = o.seed;
    m["config"] = to_json(o.config);
    m["outputs"] = outputs;
    timing["threads"] = o.threads;
    m["timing"] = std::move(timing);
    write_json(o.out_dir / (command + "_manifest.json"), m);
}

// Static strided split; results land in index order whatever the thread count.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
    const std::size_t t_count = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
    if (t_count == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(t_count);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < t_count; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += t_count) body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct Ic {
    double x0, v0;
};

std::vector<Ic> random_ics(std::size_t n, double xb, double vb, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<Ic> ics(n);
    for (auto& ic : ics) {
        ic.x0 = rng.uniform(-xb, xb);
        ic.v0 = rng.uniform(-vb, vb);
    }
    return ics;
}

// Series solution on an evenly spaced grid from a prebuilt basis.
void analytic_grid(const MathieuBasis& basis, double x0, double v0, double dt, std::vector<double>& y1,
                   std::vector<double>& y2, std::vector<double>& out) {
    const SolutionCoefficients a = basis.fit(x0, v0);
    basis.evaluate_grid(0.0, dt, y1, y2);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.alpha1 * y1[i] + a.alpha2 * y2[i];
}

}  // namespace

std::size_t warmup_count(std::size_t n) { return n / 20; }

Summary TimingSeries::summary() const {
    return summarize(std::span<const double>(samples_us).subspan(std::min(warmup, samples_us.size())));
}

CompareReport run_compare(const RunConfig& c, std::uint64_t seed, unsigned threads) {
    const VerticalSinusoid motion = as_vertical_sinusoid(c.surface);
    const auto n = static_cast<std::size_t>(c.compare.samples);
    const double dt = c.compare.t_end / static_cast<double>(n - 1);

    CompareReport rep;
    const auto t_setup = Clock::now();
    const MathieuBasis basis(to_mathieu(c.model, motion), c.series);
    rep.setup_us = elapsed_us(t_setup);

    const auto ics = random_ics(static_cast<std::size_t>(c.compare.trials), c.compare.x_bound, c.compare.v_bound, seed);
    rep.trials.resize(ics.size());
    std::vector<std::vector<double>> errors(ics.size());
    parallel_for(ics.size(), threads, [&](std::size_t k) {
        std::vector<double> y1(n), y2(n), xa(n);
        TrialResult& tr = rep.trials[k];
        tr.x0 = ics[k].x0;
        tr.v0 = ics[k].v0;

        auto t = Clock::now();
        analytic_grid(basis, tr.x0, tr.v0, dt, y1, y2, xa);
        tr.analytic_us = elapsed_us(t);

        IntegrationStats stats;
        t = Clock::now();
        const SampledTrajectory ref = integrate(c.model, motion, {tr.x0, tr.v0}, 0.0, c.compare.t_end, n, c.integrator, &stats);
        tr.numeric_us = elapsed_us(t);
        tr.rk_steps = stats.accepted;

        std::vector<double>& e = errors[k];
        e.resize(n);
        for (std::size_t i = 0; i < n; ++i) e[i] = percent_error(xa[i], ref.positions[i]);
        const Summary s = summarize(e);
        tr.mean_pct = s.mean;
        tr.max_pct = s.max;
        tr.sd_pct = s.sd;
    });
    std::vector<double> pooled;
    pooled.reserve(ics.size() * n);
    for (const auto& e : errors) pooled.insert(pooled.end(), e.begin(), e.end());
    rep.pooled = summarize(pooled);
    return rep;
}

SolveBench bench_solve(const RunConfig& c, std::uint64_t seed) {
    const VerticalSinusoid motion = as_vertical_sinusoid(c.surface);
    const MathieuParams mp = to_mathieu(c.model, motion);
    const auto n = static_cast<std::size_t>(c.compare.samples);
    const double dt = c.compare.t_end / static_cast<double>(n - 1);
    const auto reps = static_cast<std::size_t>(c.bench.reps);
    const auto ics = random_ics(reps, c.compare.x_bound, c.compare.v_bound, seed);

    SolveBench b;
    for (TimingSeries* s : {&b.analytic, &b.analytic_setup, &b.numeric}) {
        s->samples_us.reserve(reps);
        s->warmup = warmup_count(reps);
    }
    const MathieuBasis shared(mp, c.series);
    std::vector<double> y1(n), y2(n), xa(n);
    double sink = 0.0;
    for (const Ic& ic : ics) {
        auto t = Clock::now();
        analytic_grid(shared, ic.x0, ic.v0, dt, y1, y2, xa);
        b.analytic.samples_us.push_back(elapsed_us(t));
        sink += xa.back();

        t = Clock::now();
        const MathieuBasis fresh(mp, c.series);
        analytic_grid(fresh, ic.x0, ic.v0, dt, y1, y2, xa);
        b.analytic_setup.samples_us.push_back(elapsed_us(t));
        sink += xa.back();

        t = Clock::now();
        const SampledTrajectory ref = integrate(c.model, motion, {ic.x0, ic.v0}, 0.0, c.compare.t_end, n, c.integrator);
        b.numeric.samples_us.push_back(elapsed_us(t));
        sink += ref.positions.back();
    }
    if (!std::isfinite(sink)) throw NumericError("bench: non-finite trajectory");
    return b;
}

PlanBench bench_plan(const RunConfig& c) {
    const auto reps = static_cast<std::size_t>(c.bench.plan_reps);
    const std::vector<double> x0(kDecisionDim, 0.0);
    const AugmentedLagrangianSolver solver(c.plan.solver);
    PlanBench b;
    b.analytic.warmup = b.numeric.warmup = warmup_count(reps);
    PlannerNlp nlp_a, nlp_n;
    for (std::size_t r = 0; r < reps; ++r) {
        auto t = Clock::now();
        nlp_a = build_nlp(c.gait, c.surface, c.model, c.plan.options);
        const NlpResult ra = solver.solve(nlp_a.problem, x0);
        b.analytic.samples_us.push_back(elapsed_us(t));
        if (!ra.converged) throw NlpNotConvergedError("bench: analytic NLP: " + ra.message, ra);

        t = Clock::now();
        nlp_n = build_nlp(c.gait, c.surface, c.model, c.plan.options,
                          make_integrator_backend(c.gait, c.surface, c.model, c.integrator));
        const NlpResult rn = solver.solve(nlp_n.problem, x0);
        b.numeric.samples_us.push_back(elapsed_us(t));
        if (!rn.converged) throw NlpNotConvergedError("bench: integrator NLP: " + rn.message, rn);
        b.x_analytic = ra.x;
        b.x_numeric = rn.x;
    }
    b.cross_violation_analytic = constraint_violation(nlp_n, b.x_analytic);
    b.cross_violation_numeric = constraint_violation(nlp_a, b.x_numeric);
    return b;
}

void cmd_solve(const RunOptions& o, std::ostream& log) {
    const RunConfig& c = o.config;
    const auto t0 = Clock::now();
    const VerticalSinusoid motion = as_vertical_sinusoid(c.surface);
    const AnalyticSolution sol = solve_analytic(c.model, motion, {c.solve.x0, c.solve.v0}, c.series);
    const auto times = linspace(0.0, c.solve.t_end, static_cast<std::size_t>(c.solve.samples));

    auto f = open_output(o.out_dir / "solve.csv");
    f << "t_s,x_m,v_m_s,a_m_s2\n";
    for (double t : times) {
        const Kinematics k = sol.kinematics(t);
        if (!std::isfinite(k.x) || !std::isfinite(k.v) || !std::isfinite(k.a))
            throw NumericError("solve: non-finite value at t = " + num(t));
        f << num(t) << ',' << num(k.x) << ',' << num(k.v) << ',' << num(k.a) << '\n';
    }
    f.close();
    write_manifest(o, "solve", {"solve.csv"}, {{"total_ms", elapsed_us(t0) / 1e3}});
    log << "solve: " << times.size() << " rows, mu = " << num(sol.exponent().mu.real()) << " -> "
        << (o.out_dir / "solve.csv").string() << '\n';
}

void cmd_compare(const RunOptions& o, std::ostream& log) {
    const auto t0 = Clock::now();
    const CompareReport rep = run_compare(o.config, o.seed, o.threads);

    auto f = open_output(o.out_dir / "compare_trials.csv");
    f << "trial,x0_m,v0_m_s,mean_pct_err,max_pct_err,sd_pct_err,rk_steps\n";
    std::vector<double> ta, tn;
    std::vector<double> steps;
    for (std::size_t k = 0; k < rep.trials.size(); ++k) {
        const TrialResult& t = rep.trials[k];
        f << k << ',' << num(t.x0) << ',' << num(t.v0) << ',' << num(t.mean_pct) << ',' << num(t.max_pct) << ','
          << num(t.sd_pct) << ',' << t.rk_steps << '\n';
        ta.push_back(t.analytic_us);
        tn.push_back(t.numeric_us);
        steps.push_back(t.rk_steps);
    }
    f.close();

    const Summary sa = summarize(ta), sn = summarize(tn);
    json stats;
    stats["trials"] = rep.trials.size();
    stats["samples_per_trial"] = o.config.compare.samples;
    stats["percent_error"] = {{"mean", rep.pooled.mean}, {"max", rep.pooled.max}, {"sd", rep.pooled.sd}};
    stats["rk_steps"] = summary_json(summarize(steps));
    stats["timing"] = {{"analytic_us", summary_json(sa)},
                       {"numeric_us", summary_json(sn)},
                       {"basis_setup_us", rep.setup_us},
                       {"speedup", sn.mean / sa.mean}};
    write_json(o.out_dir / "compare_stats.json", stats);
    write_manifest(o, "compare", {"compare_trials.csv", "compare_stats.json"}, {{"total_ms", elapsed_us(t0) / 1e3}});
    log << "compare: " << rep.trials.size() << " trials, error mean " << num(rep.pooled.mean) << "% max "
        << num(rep.pooled.max) << "%, analytic " << sa.mean << " us vs numeric " << sn.mean << " us per trial\n";
}

void cmd_stability(const RunOptions& o, std::ostream& log) {
    const RunConfig& c = o.config;
    const auto t0 = Clock::now();
    const auto rows = sweep(c.stability.grid, c.model.g, o.threads, c.stability.marginal_tol, c.series);
    auto f = open_output(o.out_dir / "stability_sweep.csv");
    f << "A_m,omega_rad_s,z0_m,re_mu2,classification\n";
    std::size_t failed = 0, unstable = 0;
    for (const SweepRow& r : rows) {
        const bool bad = !r.error.empty();
        failed += bad;
        unstable += !bad && r.classification == Classification::Unstable;
        f << num(r.amplitude) << ',' << num(r.omega) << ',' << num(r.z0) << ',' << (bad ? "nan" : num(r.re_mu2()))
          << ',' << (bad ? "error" : to_string(r.classification)) << '\n';
    }
    f.close();
    write_manifest(o, "stability", {"stability_sweep.csv"}, {{"total_ms", elapsed_us(t0) / 1e3}});
    log << "stability: " << rows.size() << " points, " << unstable << " unstable\n";
    if (failed) throw NumericError("stability: " + std::to_string(failed) + " grid points failed");
}

void cmd_plan(const RunOptions& o, std::ostream& log) {
    const RunConfig& c = o.config;
    const auto t0 = Clock::now();
    auto backend = c.plan.backend == "integrator"
                       ? make_integrator_backend(c.gait, c.surface, c.model, c.integrator)
                       : std::shared_ptr<const TrajectoryBackend>{};
    const PlannerNlp nlp = build_nlp(c.gait, c.surface, c.model, c.plan.options, backend);
    const std::vector<double> x0(kDecisionDim, 0.0);
    const NlpResult r = AugmentedLagrangianSolver(c.plan.solver).solve(nlp.problem, x0);

    json diag;
    diag["backend"] = c.plan.backend;
    diag["variables"] = nlp.problem.n;
    diag["equalities"] = nlp.problem.n_eq;
    diag["inequalities"] = nlp.problem.inequality_count();
    diag["converged"] = r.converged;
    diag["message"] = r.message;
    diag["violation"] = r.violation;
    diag["stationarity"] = r.stationarity;
    diag["cost"] = r.cost;
    diag["outer_iterations"] = r.outer_iterations;
    diag["inner_iterations"] = r.inner_iterations;
    diag["evaluations"] = r.evaluations;
    diag["penalty"] = r.penalty;
    diag["x"] = r.x;
    json phases = json::array();
    for (const PhaseSpec& ph : nlp.context->phases) {
        json poly = json::array();
        for (Vec2 p : ph.polygon) poly.push_back({p.x, p.y});
        phases.push_back({{"phase_id", ph.index + 1},
                          {"swing_foot", std::string(to_string(ph.swing))},
                          {"t_start_s", ph.t_start},
                          {"support_point", {ph.support_point.x, ph.support_point.y}},
                          {"support_polygon", poly},
                          {"amplitude_m", ph.dynamics.amplitude},
                          {"omega_rad_s", ph.dynamics.omega}});
    }
    diag["phases"] = phases;
    const double solve_ms = r.wall_ms;

    if (!r.converged) {
        diag["timing"] = {{"nlp_ms", solve_ms}};
        write_json(o.out_dir / "plan_nlp.json", diag);
        write_manifest(o, "plan", {"plan_nlp.json"}, {{"total_ms", elapsed_us(t0) / 1e3}});
        throw InfeasiblePlanError("NLP did not converge (" + r.message + "), violation " + num(r.violation));
    }

    const CoMPlan com = com_plan(r.x, c.gait, c.surface, c.model, c.series);
    const FullBodyPlan body = lower_layer(com, c.plan.options);
    const auto rows = sample_plan(body, c.plan.dt);
    const FeasibilityReport fr = check_feasibility(com, c.plan.check_samples, o.seed);
    const bool ok = fr.ok(c.gait, c.plan.solver.tol);
    diag["feasibility"] = {{"ok", ok},
                           {"samples", fr.samples},
                           {"max_friction_ratio", fr.max_friction_ratio},
                           {"max_polygon_distance_m", fr.max_polygon_distance},
                           {"max_continuity_error_m", fr.max_continuity_error},
                           {"average_velocity_m_s", {fr.average_velocity.x, fr.average_velocity.y}}};
    diag["timing"] = {{"nlp_ms", solve_ms}};
    write_json(o.out_dir / "plan_nlp.json", diag);

    auto f = open_output(o.out_dir / "plan.csv");
    f << "t_s,base_x_m,base_y_m,base_z_m,base_pitch_rad";
    for (Foot ft : kAllFeet)
        for (const char* ax : {"x", "y", "z"}) f << ",foot" << to_string(ft) << '_' << ax << "_m";
    f << ",phase_id,support_feet_mask\n";
    for (const PlanRow& row : rows) {
        f << num(row.t) << ',' << num(row.base.x) << ',' << num(row.base.y) << ',' << num(row.base.z) << ','
          << num(row.pitch);
        for (const Vec3& p : row.feet) f << ',' << num(p.x) << ',' << num(p.y) << ',' << num(p.z);
        f << ',' << row.phase_id << ',' << row.support_mask << '\n';
    }
    f.close();
    write_manifest(o, "plan", {"plan.csv", "plan_nlp.json"}, {{"total_ms", elapsed_us(t0) / 1e3}});
    log << "plan: converged in " << r.outer_iterations << " outer / " << r.inner_iterations
        << " inner iterations, violation " << num(r.violation) << ", max friction ratio "
        << num(fr.max_friction_ratio) << ", " << rows.size() << " rows\n";
    if (!ok) throw InfeasiblePlanError("post-check failed between constraint samples");
}

void cmd_bench(const RunOptions& o, std::ostream& log) {
    const RunConfig& c = o.config;
    const auto t0 = Clock::now();
    json out;
    out["workload"] = c.bench.workload;
    if (c.bench.workload != "plan") {
        const SolveBench b = bench_solve(c, o.seed);
        const Summary a = b.analytic.summary(), as = b.analytic_setup.summary(), n = b.numeric.summary();
        out["solve"] = {{"reps", c.bench.reps},
                        {"warmup", b.analytic.warmup},
                        {"samples_per_rep", c.compare.samples},
                        {"timing",
                         {{"analytic_us", summary_json(a)},
                          {"analytic_with_setup_us", summary_json(as)},
                          {"numeric_us", summary_json(n)},
                          {"speedup", n.mean / a.mean},
                          {"speedup_with_setup", n.mean / as.mean}}}};
        log << "bench solve: analytic " << a.mean << " +- " << a.sd << " us, with setup " << as.mean
            << " us, numeric " << n.mean << " +- " << n.sd << " us, speedup " << n.mean / a.mean << "\n";
    }
    if (c.bench.workload != "solve") {
        const PlanBench b = bench_plan(c);
        const Summary a = b.analytic.summary(), n = b.numeric.summary();
        out["plan"] = {{"reps", c.bench.plan_reps},
                       {"warmup", b.analytic.warmup},
                       {"cross_violation_analytic_on_numeric", b.cross_violation_analytic},
                       {"cross_violation_numeric_on_analytic", b.cross_violation_numeric},
                       {"timing",
                        {{"analytic_ms", summary_json({a.count, a.mean / 1e3, a.sd / 1e3, a.min / 1e3, a.max / 1e3})},
                         {"numeric_ms", summary_json({n.count, n.mean / 1e3, n.sd / 1e3, n.min / 1e3, n.max / 1e3})},
                         {"speedup", n.mean / a.mean}}}};
        log << "bench plan: analytic " << a.mean / 1e3 << " ms, numeric " << n.mean / 1e3 << " ms, speedup "
            << n.mean / a.mean << "\n";
    }
    write_json(o.out_dir / "bench.json", out);
    write_manifest(o, "bench", {"bench.json"}, {{"total_ms", elapsed_us(t0) / 1e3}});
}

json strip_timing(json j) {
    if (j.is_object()) {
        j.erase("timing");
        for (auto& [k, v] : j.items()) v = strip_timing(v);
    } else if (j.is_array()) {
        for (auto& v : j) v = strip_timing(v);
    }
    return j;
}

}  // namespace drslip::cli
