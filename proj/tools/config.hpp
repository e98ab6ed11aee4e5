#pragma once

// Run configuration for the drslip tool: a JSON document (comments allowed)
// with one optional section per concern. Every field has a default; unknown
// keys are rejected so that typos do not silently fall back to defaults.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "drslip/gait.hpp"
#include "drslip/mathieu.hpp"
#include "drslip/model.hpp"
#include "drslip/nlp.hpp"
#include "drslip/oracle.hpp"
#include "drslip/planner.hpp"
#include "drslip/stability.hpp"

namespace drslip::cli {

using json = nlohmann::ordered_json;

struct SolveSection {
    double x0 = 0.1;  // [m]
    double v0 = 0.0;  // [m/s]
    double t_end = 0.5;
    int samples = 1000;
};

struct CompareSection {
    int trials = 1000;
    double t_end = 0.5;
    int samples = 1000;
    double x_bound = 0.2;  // ICs uniform in |x0| < x_bound
    double v_bound = 0.2;
};

struct StabilitySection {
    SweepGrid grid;
    double marginal_tol = kMarginalTol;
};

struct PlanSection {
    PlannerOptions options;
    NlpOptions solver;
    double dt = 0.01;  // output sampling [s]
    std::string backend = "analytic";  // or "integrator"
    int check_samples = 100;           // post-check times per phase
};

struct BenchSection {
    std::string workload = "all";  // solve | plan | all
    int reps = 1000;
    int plan_reps = 10;
};

struct RunConfig {
    ModelParams model;
    SurfaceMotion surface = VerticalSinusoid{0.07, std::numbers::pi, 0.0};
    SeriesConfig series;
    IntegratorConfig integrator;
    SolveSection solve;
    CompareSection compare;
    StabilitySection stability;
    GaitParams gait;
    PlanSection plan;
    BenchSection bench;
};

/// Parses a config document. `source` names it in diagnostics.
RunConfig parse_config(const json& doc, const std::string& source = "config");

/// Parses text; syntax errors become ConfigError with line and column.
json parse_json_text(const std::string& text, const std::string& source);

/// Fully materialized config; parse_config(to_json(c)) reproduces c exactly.
json to_json(const RunConfig& c);

struct LoadedConfig {
    RunConfig config;
    std::uint64_t seed = 1;
    bool seed_from_manifest = false;
};

/// Reads a config file, or a manifest written by a previous run (its
/// resolved config and seed are reused).
LoadedConfig load_config_file(const std::string& path);

}  // namespace drslip::cli
