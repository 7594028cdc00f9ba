// config.hpp — flat `key = value` run configuration with fail-closed parsing.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gaugeline/dynamics.hpp"
#include "gaugeline/potentials.hpp"

namespace gaugeline {

struct SweepAxis {
    std::string name;                 // a scalar config key
    std::vector<std::string> values;  // raw values, validated on parse
};

struct RunConfig {
    SystemConfig system;
    double Y_over_l = 1e6;
    std::vector<Gauge> gauges{Gauge::lorentz, Gauge::coulomb, Gauge::multipolar};
    std::vector<Background> backgrounds{Background::multipolar};
    double t_f_ns = 0.0;  // 0: one transit
    OmegaGridSpec omega;
    TimeGridSpec time_grid;
    double coupling_scale = 1.0;
    bool berry_correction = false;
    std::size_t oracle_grid_points = 4001;
    bool oracle_photon_conserving = true;
    std::vector<SweepAxis> sweep;
    std::string out_dir;
    unsigned workers = 1;

    SpectrumOptions spectrum_options() const;

    // Every physics-relevant setting as key/value text, in a fixed order.
    // out_dir, workers and sweep axes are excluded so that artifacts do not
    // depend on where or how wide a run was executed.
    std::vector<std::pair<std::string, std::string>> effective() const;
};

// Applies one setting; throws ConfigError naming the key on a bad value or an
// unknown key.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

// Cross-field validation; throws ConfigError.
void validate(const RunConfig& cfg);

RunConfig parse_config_text(std::string_view text, std::string_view source = "<config>");
RunConfig parse_config(const std::filesystem::path& path);

// Keys accepted as sweep axes.
bool is_sweepable(std::string_view key);

}  // namespace gaugeline
