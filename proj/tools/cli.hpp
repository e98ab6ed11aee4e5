#pragma once

// Command implementations behind the drslip executable. Each cmd_* writes its
// files plus a <command>_manifest.json into the output directory; wall times
// only ever appear under a "timing" key so that everything else is
// reproducible byte for byte.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "drslip/stats.hpp"

namespace drslip::cli {

inline constexpr const char* kToolName = "drslip";
inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitNumeric = 3, kExitInfeasible = 4 };

struct RunOptions {
    RunConfig config;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = ".";
    unsigned threads = 1;
};

struct TrialResult {
    double x0 = 0.0;
    double v0 = 0.0;
    double mean_pct = 0.0;
    double max_pct = 0.0;
    double sd_pct = 0.0;
    int rk_steps = 0;
    double analytic_us = 0.0;  // fit + evaluation on the sample grid
    double numeric_us = 0.0;   // adaptive RK over the same grid
};

/// Random-IC accuracy and timing comparison of the series solution against
/// the RK oracle.
struct CompareReport {
    std::vector<TrialResult> trials;
    Summary pooled;        // percentage errors over every sample of every trial
    double setup_us = 0.0;  // one-off basis construction
};

CompareReport run_compare(const RunConfig& c, std::uint64_t seed, unsigned threads = 1);

/// Per-rep wall times with the warm-up prefix (first 5%) removed.
struct TimingSeries {
    std::vector<double> samples_us;
    std::size_t warmup = 0;
    Summary summary() const;
};

struct SolveBench {
    TimingSeries analytic;        // fit + evaluate, shared basis
    TimingSeries analytic_setup;  // basis construction + fit + evaluate
    TimingSeries numeric;
};

SolveBench bench_solve(const RunConfig& c, std::uint64_t seed);

struct PlanBench {
    TimingSeries analytic;  // build + solve, series constraints
    TimingSeries numeric;   // build + solve, RK constraints
    std::vector<double> x_analytic, x_numeric;
    double cross_violation_analytic = 0.0;  // analytic solution checked on the RK problem
    double cross_violation_numeric = 0.0;   // and the reverse
};

PlanBench bench_plan(const RunConfig& c);

/// Warm-up reps excluded from a timing series of n reps.
std::size_t warmup_count(std::size_t n);

void cmd_solve(const RunOptions& o, std::ostream& log);
void cmd_compare(const RunOptions& o, std::ostream& log);
void cmd_stability(const RunOptions& o, std::ostream& log);
void cmd_plan(const RunOptions& o, std::ostream& log);
void cmd_bench(const RunOptions& o, std::ostream& log);

/// Entry point: parses arguments, runs one command, maps errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Drops every "timing" member, recursively; what remains must be identical
/// across reruns.
json strip_timing(json j);

}  // namespace drslip::cli
