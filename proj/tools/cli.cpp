#include "cli.hpp"

#include <ostream>

#include <CLI11.hpp>

namespace drslip::cli {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"DRS-LIP analytic solutions, stability sweeps and gait planning", kToolName};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    unsigned threads = 1;
    app.add_option("--config", config_path, "JSON config, or a manifest from an earlier run");
    auto* seed_opt = app.add_option("--seed", seed, "seed for random initial conditions and post-checks");
    app.add_option("--out", out_dir, "output directory (created if missing)");
    app.add_option("--threads", threads, "worker threads for compare and stability")->check(CLI::Range(1u, 256u));

    struct Cmd {
        const char* name;
        const char* help;
        void (*fn)(const RunOptions&, std::ostream&);
    };
    const Cmd cmds[] = {
        {"solve", "analytic trajectory for one initial state", cmd_solve},
        {"compare", "series solution vs RK oracle over random initial states", cmd_compare},
        {"stability", "Floquet classification over a parameter grid", cmd_stability},
        {"plan", "two-layer gait plan", cmd_plan},
        {"bench", "timing of analytic vs numeric solves and NLPs", cmd_bench},
    };
    for (const Cmd& c : cmds) app.add_subcommand(c.name, c.help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        RunOptions o;
        if (!config_path.empty()) {
            LoadedConfig lc = load_config_file(config_path);
            o.config = std::move(lc.config);
            o.seed = lc.seed;
        } else {
            o.config = parse_config(json::object());
        }
        if (*seed_opt) o.seed = seed;
        o.threads = threads;
        o.out_dir = out_dir;
        std::filesystem::create_directories(o.out_dir);
        for (const Cmd& c : cmds)
            if (app.got_subcommand(c.name)) c.fn(o, out);
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "drslip: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InfeasiblePlanError& e) {
        err << "drslip: infeasible plan: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const NumericError& e) {
        err << "drslip: numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "drslip: error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace drslip::cli
