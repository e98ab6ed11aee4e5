#include "config.hpp"

#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace drslip::cli {
namespace {

// Strict view of one JSON object: typed getters that remember which keys
// were consumed, and finish() to reject the rest.
class Section {
public:
    Section(const json* node, std::string path) : node_(node), path_(std::move(path)) {
        if (node_ && !node_->is_object()) throw ConfigError(path_ + ": expected an object");
    }

    bool has(const char* key) const { return node_ && node_->contains(key); }

    void get(const char* key, double& out) { read(key, out, "a number", [](const json& v) { return v.is_number(); }); }
    void get(const char* key, int& out) {
        read(key, out, "an integer", [](const json& v) { return v.is_number_integer(); });
    }
    void get(const char* key, bool& out) { read(key, out, "true or false", [](const json& v) { return v.is_boolean(); }); }
    void get(const char* key, std::string& out) {
        read(key, out, "a string", [](const json& v) { return v.is_string(); });
    }

    const json* raw(const char* key) {
        if (!has(key)) return nullptr;
        used_.insert(key);
        return &(*node_)[key];
    }

    Section child(const char* key) {
        const json* n = raw(key);
        return Section(n, path_ + "." + key);
    }

    std::string path(const char* key) const { return path_ + "." + key; }

    void finish() const {
        if (!node_) return;
        for (const auto& [k, v] : node_->items())
            if (!used_.count(k)) throw ConfigError(path_ + ": unknown key '" + k + "'");
    }

private:
    template <class T, class Pred>
    void read(const char* key, T& out, const char* what, Pred ok) {
        const json* v = raw(key);
        if (!v) return;
        if (!ok(*v)) throw ConfigError(path(key) + ": expected " + what);
        out = v->template get<T>();
    }

    const json* node_;
    std::string path_;
    std::set<std::string> used_;
};

Vec2 read_point(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError(path + ": expected [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
}

SurfaceMotion read_surface(Section s) {
    SurfaceMotion out;
    if (s.has("preset")) {
        std::string name;
        s.get("preset", name);
        s.finish();
        return surface_preset(name);
    }
    std::string type = "vertical";
    s.get("type", type);
    if (type == "vertical") {
        VerticalSinusoid v{0.07, std::numbers::pi, 0.0};
        s.get("amplitude", v.amplitude);
        s.get("omega", v.omega);
        s.get("phase", v.phase);
        out = v;
    } else if (type == "pitching") {
        Pitching p{5.0 * std::numbers::pi / 180.0, 0.5, 1.0};
        if (s.has("pitch_amplitude_deg") && s.has("pitch_amplitude_rad"))
            throw ConfigError(s.path("pitch_amplitude_deg") + ": give the amplitude in degrees or radians, not both");
        if (s.has("pitch_amplitude_deg")) {
            double deg = 0.0;
            s.get("pitch_amplitude_deg", deg);
            p.pitch_amplitude = deg * std::numbers::pi / 180.0;
        }
        s.get("pitch_amplitude_rad", p.pitch_amplitude);
        s.get("pitch_frequency_hz", p.pitch_frequency);
        s.get("reference_radius", p.reference_radius);
        out = p;
    } else {
        throw ConfigError(s.path("type") + ": expected \"vertical\" or \"pitching\"");
    }
    s.finish();
    return out;
}

void read_axis(Section s, SweepAxis& a) {
    s.get("lo", a.lo);
    s.get("hi", a.hi);
    s.get("count", a.count);
    s.get("open_lower", a.open_lower);
    s.finish();
}

GaitParams read_gait(Section s) {
    std::string preset = "G1";
    s.get("preset", preset);
    GaitParams g = gait_preset(preset);
    s.get("friction_coefficient", g.friction_coefficient);
    s.get("z0", g.z0);
    s.get("gait_period", g.gait_period);
    s.get("avg_velocity", g.avg_velocity);
    s.get("step_length", g.step_length);
    s.get("max_step_height", g.max_step_height);
    if (const json* f = s.raw("footholds")) {
        const std::string path = s.path("footholds");
        if (!f->is_object()) throw ConfigError(path + ": expected an object keyed by foot name");
        for (const auto& [name, v] : f->items())
            g.initial_footholds[static_cast<int>(foot_from_string(name))] = read_point(v, path + "." + name);
    }
    if (const json* seq = s.raw("contact_sequence")) {
        const std::string path = s.path("contact_sequence");
        if (!seq->is_array() || seq->size() != 4) throw ConfigError(path + ": expected four foot names");
        for (std::size_t k = 0; k < 4; ++k) {
            if (!(*seq)[k].is_string()) throw ConfigError(path + ": expected four foot names");
            g.contact_sequence[k] = foot_from_string((*seq)[k].get<std::string>());
        }
    }
    s.finish();
    return g;
}

}  // namespace

json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ": " + e.what());
    }
}

RunConfig parse_config(const json& doc, const std::string& source) {
    RunConfig c;
    Section root(&doc, source);

    Section model = root.child("model");
    model.get("z0", c.model.z0);
    model.get("g", c.model.g);
    model.get("mass", c.model.m);
    model.finish();

    c.surface = read_surface(root.child("surface"));

    Section series = root.child("series");
    series.get("terms", c.series.terms);
    series.get("depth", c.series.depth);
    series.get("hill_half_width", c.series.hill_half_width);
    series.finish();

    Section integ = root.child("integrator");
    integ.get("rel_tol", c.integrator.rel_tol);
    integ.get("abs_tol", c.integrator.abs_tol);
    integ.get("max_step", c.integrator.max_step);
    integ.get("min_step", c.integrator.min_step);
    integ.finish();

    Section solve = root.child("solve");
    solve.get("x0", c.solve.x0);
    solve.get("v0", c.solve.v0);
    solve.get("t_end", c.solve.t_end);
    solve.get("samples", c.solve.samples);
    solve.finish();

    Section cmp = root.child("compare");
    cmp.get("trials", c.compare.trials);
    cmp.get("t_end", c.compare.t_end);
    cmp.get("samples", c.compare.samples);
    cmp.get("x_bound", c.compare.x_bound);
    cmp.get("v_bound", c.compare.v_bound);
    cmp.finish();

    Section stab = root.child("stability");
    read_axis(stab.child("amplitude"), c.stability.grid.amplitude);
    read_axis(stab.child("omega"), c.stability.grid.omega);
    read_axis(stab.child("z0"), c.stability.grid.z0);
    stab.get("omega_min", c.stability.grid.omega_min);
    stab.get("marginal_tol", c.stability.marginal_tol);
    stab.finish();

    c.gait = read_gait(root.child("gait"));

    Section plan = root.child("plan");
    plan.get("n_check", c.plan.options.n_check);
    plan.get("four_leg_fraction", c.plan.options.four_leg_fraction);
    plan.get("max_offset", c.plan.options.max_offset);
    plan.get("max_speed", c.plan.options.max_speed);
    plan.get("dt", c.plan.dt);
    plan.get("backend", c.plan.backend);
    plan.get("check_samples", c.plan.check_samples);
    plan.get("tol", c.plan.solver.tol);
    plan.get("max_outer", c.plan.solver.max_outer);
    plan.get("max_inner", c.plan.solver.max_inner);
    plan.get("initial_penalty", c.plan.solver.initial_penalty);
    plan.get("penalty_growth", c.plan.solver.penalty_growth);
    plan.get("max_penalty", c.plan.solver.max_penalty);
    plan.get("fd_step", c.plan.solver.fd_step);
    plan.finish();
    c.plan.options.series = c.series;

    Section bench = root.child("bench");
    bench.get("workload", c.bench.workload);
    bench.get("reps", c.bench.reps);
    bench.get("plan_reps", c.bench.plan_reps);
    bench.finish();

    root.finish();

    // Validate everything up front so every command fails the same way.
    c.model.validate();
    validate(c.surface);
    c.series.validate();
    c.integrator.validate();
    if (!(c.solve.t_end > 0.0) || c.solve.samples < 2) throw ConfigError(source + ".solve: need t_end > 0 and samples >= 2");
    if (c.compare.trials < 1 || c.compare.samples < 2 || !(c.compare.t_end > 0.0))
        throw ConfigError(source + ".compare: need trials >= 1, samples >= 2, t_end > 0");
    if (!(c.compare.x_bound >= 0.0) || !(c.compare.v_bound >= 0.0))
        throw ConfigError(source + ".compare: bounds must be >= 0");
    c.stability.grid.validate();
    if (!(c.stability.marginal_tol >= 0.0)) throw ConfigError(source + ".stability: marginal_tol must be >= 0");
    c.gait.validate();
    c.plan.options.validate();
    c.plan.solver.validate();
    if (!(c.plan.dt > 0.0)) throw ConfigError(source + ".plan: dt must be > 0");
    if (c.plan.backend != "analytic" && c.plan.backend != "integrator")
        throw ConfigError(source + ".plan.backend: expected \"analytic\" or \"integrator\"");
    if (c.plan.check_samples < 1) throw ConfigError(source + ".plan: check_samples must be >= 1");
    if (c.bench.workload != "solve" && c.bench.workload != "plan" && c.bench.workload != "all")
        throw ConfigError(source + ".bench.workload: expected \"solve\", \"plan\" or \"all\"");
    if (c.bench.reps < 1 || c.bench.plan_reps < 1) throw ConfigError(source + ".bench: reps must be >= 1");
    return c;
}

namespace {

json axis_json(const SweepAxis& a) {
    return {{"lo", a.lo}, {"hi", a.hi}, {"count", a.count}, {"open_lower", a.open_lower}};
}

}  // namespace

json to_json(const RunConfig& c) {
    json j;
    j["model"] = {{"z0", c.model.z0}, {"g", c.model.g}, {"mass", c.model.m}};
    if (const auto* v = std::get_if<VerticalSinusoid>(&c.surface)) {
        j["surface"] = {{"type", "vertical"}, {"amplitude", v->amplitude}, {"omega", v->omega}, {"phase", v->phase}};
    } else {
        const auto& p = std::get<Pitching>(c.surface);
        j["surface"] = {{"type", "pitching"},
                        {"pitch_amplitude_rad", p.pitch_amplitude},
                        {"pitch_frequency_hz", p.pitch_frequency},
                        {"reference_radius", p.reference_radius}};
    }
    j["series"] = {{"terms", c.series.terms}, {"depth", c.series.depth}, {"hill_half_width", c.series.hill_half_width}};
    j["integrator"] = {{"rel_tol", c.integrator.rel_tol},
                       {"abs_tol", c.integrator.abs_tol},
                       {"max_step", c.integrator.max_step},
                       {"min_step", c.integrator.min_step}};
    j["solve"] = {{"x0", c.solve.x0}, {"v0", c.solve.v0}, {"t_end", c.solve.t_end}, {"samples", c.solve.samples}};
    j["compare"] = {{"trials", c.compare.trials},
                    {"t_end", c.compare.t_end},
                    {"samples", c.compare.samples},
                    {"x_bound", c.compare.x_bound},
                    {"v_bound", c.compare.v_bound}};
    j["stability"] = {{"amplitude", axis_json(c.stability.grid.amplitude)},
                      {"omega", axis_json(c.stability.grid.omega)},
                      {"z0", axis_json(c.stability.grid.z0)},
                      {"omega_min", c.stability.grid.omega_min},
                      {"marginal_tol", c.stability.marginal_tol}};
    json feet = json::object();
    for (Foot f : kAllFeet) {
        const Vec2 p = c.gait.initial_footholds[static_cast<int>(f)];
        feet[std::string(to_string(f))] = json::array({p.x, p.y});
    }
    json seq = json::array();
    for (Foot f : c.gait.contact_sequence) seq.push_back(std::string(to_string(f)));
    j["gait"] = {{"friction_coefficient", c.gait.friction_coefficient},
                 {"z0", c.gait.z0},
                 {"gait_period", c.gait.gait_period},
                 {"avg_velocity", c.gait.avg_velocity},
                 {"step_length", c.gait.step_length},
                 {"max_step_height", c.gait.max_step_height},
                 {"footholds", feet},
                 {"contact_sequence", seq}};
    const PlanSection& p = c.plan;
    j["plan"] = {{"n_check", p.options.n_check},
                 {"four_leg_fraction", p.options.four_leg_fraction},
                 {"max_offset", p.options.max_offset},
                 {"max_speed", p.options.max_speed},
                 {"dt", p.dt},
                 {"backend", p.backend},
                 {"check_samples", p.check_samples},
                 {"tol", p.solver.tol},
                 {"max_outer", p.solver.max_outer},
                 {"max_inner", p.solver.max_inner},
                 {"initial_penalty", p.solver.initial_penalty},
                 {"penalty_growth", p.solver.penalty_growth},
                 {"max_penalty", p.solver.max_penalty},
                 {"fd_step", p.solver.fd_step}};
    j["bench"] = {{"workload", c.bench.workload}, {"reps", c.bench.reps}, {"plan_reps", c.bench.plan_reps}};
    return j;
}

LoadedConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    const json doc = parse_json_text(ss.str(), path);
    LoadedConfig out;
    // A manifest carries the resolved config and the seed of its run.
    if (doc.is_object() && doc.contains("tool") && doc.contains("config")) {
        if (!doc["config"].is_object()) throw ConfigError(path + ".config: expected an object");
        out.config = parse_config(doc["config"], path + ".config");
        if (doc.contains("seed")) {
            if (!doc["seed"].is_number_unsigned()) throw ConfigError(path + ".seed: expected an unsigned integer");
            out.seed = doc["seed"].get<std::uint64_t>();
            out.seed_from_manifest = true;
        }
        return out;
    }
    out.config = parse_config(doc, path);
    return out;
}

}  // namespace drslip::cli
