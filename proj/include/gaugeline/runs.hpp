// runs.hpp — the CLI subcommands as library calls. Each run writes its CSV
// artifacts and key=value sidecars under cfg.out_dir and returns a process
// exit code.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gaugeline/config.hpp"
#include "gaugeline/csv.hpp"

namespace gaugeline {

std::string version();

// Effective config plus the code version, for metadata sidecars.
csv::Metadata base_metadata(const RunConfig& cfg);

int run_trajectory(const RunConfig& cfg);
int run_adiabaticity(const RunConfig& cfg);
int run_spectrum(const RunConfig& cfg);
int run_compare(const RunConfig& cfg);
int run_oracle(const RunConfig& cfg);
int run_sweep(const RunConfig& cfg);

struct PeakRow {
    std::string label;  // gauge name or "unperturbed"
    Background background = Background::multipolar;
    double peak_omega_per_s = 0.0;
    double emitted_probability = 0.0;
    double c1_final_abs2 = 1.0;
};

// The spectrum run without its file output: one row per configured gauge and
// background, followed by the unperturbed (N = 0) reference when N != 0.
// With `out_dir` non-empty the spectrum CSVs are written there as well.
std::vector<PeakRow> spectrum_peaks(const RunConfig& cfg, const std::filesystem::path& out_dir = {});

struct OracleCheck {
    std::string name;
    std::string gauge;
    double oracle = 0.0;
    double production = 0.0;
    double residual = 0.0;
    double bound = 0.0;
    bool pass = false;
};

// Every oracle comparison with its bound; run_oracle writes these.
std::vector<OracleCheck> oracle_checks(const RunConfig& cfg);

}  // namespace gaugeline
