// gaugeline — command-line front end for the trajectory, adiabaticity,
// spectrum, background-comparison, oracle and sweep runs.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gaugeline/config.hpp"
#include "gaugeline/errors.hpp"
#include "gaugeline/runs.hpp"

namespace {

// Exit codes: 0 success, 1 runtime failure, 2 bad invocation or config,
// 3 oracle bound violated.
constexpr int exit_runtime = 1;
constexpr int exit_config = 2;
constexpr int exit_bound = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gauge-dependent emission of an oscillator passed by a relativistic charge cluster"};
    app.set_version_flag("--version", gaugeline::version());
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    unsigned workers = 0;
    bool seedless = false;
    app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (falls back to out_dir, then $GAUGELINE_OUT)");
    app.add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 1024u));
    app.add_flag("--seedless", seedless, "reserved; the pipeline uses no random numbers");

    using Run = int (*)(const gaugeline::RunConfig&);
    const std::pair<const char*, Run> commands[] = {
        {"trajectory", gaugeline::run_trajectory},
        {"adiabaticity", gaugeline::run_adiabaticity},
        {"spectrum", gaugeline::run_spectrum},
        {"compare-gauges", gaugeline::run_compare},
        {"oracle", gaugeline::run_oracle},
        {"sweep", gaugeline::run_sweep},
    };
    const char* descriptions[] = {
        "equilibrium position, spring constant and frequency per gauge",
        "adiabaticity parameter r01 per gauge",
        "transient emission spectra and peak table",
        "multipolar versus minimal-coupling background spectra",
        "oracle residual table; nonzero exit on a violated bound",
        "Cartesian parameter sweep with summary table",
    };
    for (std::size_t i = 0; i < std::size(commands); ++i) app.add_subcommand(commands[i].first, descriptions[i])->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : exit_config;
    }

    if (seedless) {
        std::cerr << "error: --seedless is reserved and not accepted; every run is already deterministic\n";
        return exit_config;
    }

    try {
        gaugeline::RunConfig cfg = config_path.empty() ? gaugeline::parse_config_text("")
                                                       : gaugeline::parse_config(config_path);
        if (!out_dir.empty()) {
            cfg.out_dir = out_dir;
        } else if (cfg.out_dir.empty()) {
            const char* env = std::getenv("GAUGELINE_OUT");
            cfg.out_dir = env && *env ? env : ".";
        }
        if (workers > 0) cfg.workers = workers;
        std::filesystem::create_directories(cfg.out_dir);

        for (const auto& [name, run] : commands)
            if (app.got_subcommand(name)) return run(cfg);
    } catch (const gaugeline::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const gaugeline::BoundViolation& e) {
        std::cerr << "bound violation: " << e.what() << '\n';
        return exit_bound;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_runtime;
}
