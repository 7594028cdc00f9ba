#include "gaugeline/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gaugeline/csv.hpp"
#include "gaugeline/errors.hpp"

namespace gaugeline {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(trim(s.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view why) {
    throw ConfigError(std::string(key) + ": " + std::string(why) + " (got '" + std::string(value) + "')");
}

double to_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
        bad(key, v, "expected a finite number");
    return out;
}

std::size_t to_count(std::string_view key, std::string_view v) {
    // Accept integral values written in floating notation, e.g. 2.4e4.
    const double d = to_double(key, v);
    if (d < 0.0 || d != std::floor(d) || d > 1e15) bad(key, v, "expected a non-negative integer");
    return static_cast<std::size_t>(d);
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad(key, v, "expected true or false");
}

const std::vector<std::string_view>& scalar_keys() {
    static const std::vector<std::string_view> keys{
        "N", "beta", "l_nm", "Y_over_l", "span_Y", "electron_mass_eV", "cluster_charge_sign", "t_f_ns",
        "omega_center_per_s", "omega_half_width_per_s", "omega_points", "omega_insert_half_width_per_s",
        "omega_insert_factor", "time_coarse_intervals", "time_refine_factor", "time_refine_half_width_Y",
        "coupling_scale", "berry_correction",
    };
    return keys;
}

}  // namespace

bool is_sweepable(std::string_view key) {
    const auto& k = scalar_keys();
    return std::find(k.begin(), k.end(), key) != k.end();
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
    auto& s = cfg.system;
    if (key == "N") {
        s.cluster_count = to_double(key, value);
    } else if (key == "beta") {
        s.beta = to_double(key, value);
    } else if (key == "l_nm") {
        s.l_nm = to_double(key, value);
    } else if (key == "Y_over_l") {
        cfg.Y_over_l = to_double(key, value);
    } else if (key == "span_Y") {
        s.span_in_Y = to_double(key, value);
    } else if (key == "electron_mass_eV") {
        s.electron_mass_eV = to_double(key, value);
    } else if (key == "cluster_charge_sign") {
        const double v = to_double(key, value);
        if (v != 1.0 && v != -1.0) bad(key, value, "expected +1 or -1");
        s.cluster_charge_sign = static_cast<int>(v);
    } else if (key == "gauge") {
        std::vector<Gauge> g;
        for (auto item : split_list(value)) {
            try {
                g.push_back(parse_gauge(item));
            } catch (const Error&) {
                bad(key, item, "expected lorentz, coulomb or multipolar");
            }
        }
        cfg.gauges = std::move(g);
    } else if (key == "background") {
        std::vector<Background> b;
        for (auto item : split_list(value)) {
            try {
                b.push_back(parse_background(item));
            } catch (const Error&) {
                bad(key, item, "expected multipolar or minimal");
            }
        }
        cfg.backgrounds = std::move(b);
    } else if (key == "t_f_ns") {
        cfg.t_f_ns = to_double(key, value);
    } else if (key == "omega_center_per_s") {
        cfg.omega.center_per_s = to_double(key, value);
    } else if (key == "omega_half_width_per_s") {
        cfg.omega.half_width_per_s = to_double(key, value);
    } else if (key == "omega_points") {
        cfg.omega.points = to_count(key, value);
    } else if (key == "omega_insert_half_width_per_s") {
        cfg.omega.insert_half_width_per_s = to_double(key, value);
    } else if (key == "omega_insert_factor") {
        cfg.omega.insert_factor = to_count(key, value);
    } else if (key == "time_coarse_intervals") {
        cfg.time_grid.coarse_intervals = to_count(key, value);
    } else if (key == "time_refine_factor") {
        cfg.time_grid.refine_factor = to_count(key, value);
    } else if (key == "time_refine_half_width_Y") {
        cfg.time_grid.refine_half_width_Y = to_double(key, value);
    } else if (key == "coupling_scale") {
        cfg.coupling_scale = to_double(key, value);
    } else if (key == "berry_correction") {
        cfg.berry_correction = to_bool(key, value);
    } else if (key == "oracle_grid_points") {
        cfg.oracle_grid_points = to_count(key, value);
    } else if (key == "oracle_photon_conserving") {
        cfg.oracle_photon_conserving = to_bool(key, value);
    } else if (key == "out_dir") {
        cfg.out_dir = std::string(value);
    } else if (key == "workers") {
        const auto w = to_count(key, value);
        if (w < 1 || w > 1024) bad(key, value, "expected 1..1024");
        cfg.workers = static_cast<unsigned>(w);
    } else if (key.starts_with("sweep.")) {
        const auto name = key.substr(6);
        if (!is_sweepable(name)) bad(key, value, "sweep axis must name a scalar parameter");
        SweepAxis axis{std::string(name), {}};
        for (auto item : split_list(value)) {
            if (item.empty()) bad(key, value, "empty sweep value");
            RunConfig probe = cfg;
            apply_setting(probe, name, item);
            axis.values.emplace_back(item);
        }
        auto it = std::find_if(cfg.sweep.begin(), cfg.sweep.end(), [&](const SweepAxis& a) { return a.name == name; });
        if (it != cfg.sweep.end())
            *it = std::move(axis);
        else
            cfg.sweep.push_back(std::move(axis));
    } else {
        throw ConfigError("unknown key '" + std::string(key) + "'");
    }
    s.Y_nm = cfg.Y_over_l * s.l_nm;
    // per-field ranges, so that the error points at the offending line
    s.validate();
}

void validate(const RunConfig& cfg) {
    cfg.system.validate();
    if (cfg.gauges.empty()) throw ConfigError("gauge: at least one gauge required");
    if (cfg.backgrounds.empty()) throw ConfigError("background: at least one background required");
    if (cfg.t_f_ns < 0.0) throw ConfigError("t_f_ns: must be non-negative");
    if (cfg.system.beta == 0.0 && cfg.t_f_ns <= 0.0)
        throw ConfigError("t_f_ns: required when beta = 0 (no transit duration)");
    if (cfg.omega.points < 3 || cfg.omega.points % 2 == 0) throw ConfigError("omega_points: must be odd and >= 3");
    if (!(cfg.omega.half_width_per_s > 0.0)) throw ConfigError("omega_half_width_per_s: must be positive");
    if (cfg.omega.center_per_s < 0.0) throw ConfigError("omega_center_per_s: must be non-negative");
    if (cfg.omega.insert_half_width_per_s < 0.0) throw ConfigError("omega_insert_half_width_per_s: must be non-negative");
    if (cfg.omega.insert_factor < 1) throw ConfigError("omega_insert_factor: must be >= 1");
    if (cfg.time_grid.coarse_intervals < 2) throw ConfigError("time_coarse_intervals: must be >= 2");
    if (cfg.time_grid.refine_factor < 1) throw ConfigError("time_refine_factor: must be >= 1");
    if (cfg.time_grid.refine_half_width_Y < 0.0) throw ConfigError("time_refine_half_width_Y: must be non-negative");
    if (!(cfg.coupling_scale > 0.0)) throw ConfigError("coupling_scale: must be positive");
    if (cfg.oracle_grid_points < 3) throw ConfigError("oracle_grid_points: must be >= 3");
}

SpectrumOptions RunConfig::spectrum_options() const {
    SpectrumOptions o;
    o.time_grid = time_grid;
    o.coupling_scale = coupling_scale;
    o.berry_correction = berry_correction;
    o.workers = workers;
    return o;
}

std::vector<std::pair<std::string, std::string>> RunConfig::effective() const {
    using csv::format;
    std::string gauge_list, bg_list;
    for (auto g : gauges) gauge_list += (gauge_list.empty() ? "" : ",") + std::string(to_string(g));
    for (auto b : backgrounds) bg_list += (bg_list.empty() ? "" : ",") + std::string(to_string(b));
    return {
        {"N", format(system.cluster_count)},
        {"beta", format(system.beta)},
        {"l_nm", format(system.l_nm)},
        {"Y_over_l", format(Y_over_l)},
        {"span_Y", format(system.span_in_Y)},
        {"electron_mass_eV", format(system.electron_mass_eV)},
        {"cluster_charge_sign", format(static_cast<long long>(system.cluster_charge_sign))},
        {"gauge", gauge_list},
        {"background", bg_list},
        {"t_f_ns", format(t_f_ns)},
        {"omega_center_per_s", format(omega.center_per_s)},
        {"omega_half_width_per_s", format(omega.half_width_per_s)},
        {"omega_points", format(static_cast<unsigned long long>(omega.points))},
        {"omega_insert_half_width_per_s", format(omega.insert_half_width_per_s)},
        {"omega_insert_factor", format(static_cast<unsigned long long>(omega.insert_factor))},
        {"time_coarse_intervals", format(static_cast<unsigned long long>(time_grid.coarse_intervals))},
        {"time_refine_factor", format(static_cast<unsigned long long>(time_grid.refine_factor))},
        {"time_refine_half_width_Y", format(time_grid.refine_half_width_Y)},
        {"coupling_scale", format(coupling_scale)},
        {"berry_correction", berry_correction ? "true" : "false"},
        {"oracle_grid_points", format(static_cast<unsigned long long>(oracle_grid_points))},
        {"oracle_photon_conserving", oracle_photon_conserving ? "true" : "false"},
    };
}

RunConfig parse_config_text(std::string_view text, std::string_view source) {
    RunConfig cfg;
    std::size_t line_no = 0;
    std::vector<std::string> seen;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto where = [&] { return std::string(source) + ":" + std::to_string(line_no) + ": "; };
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where() + "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where() + "missing key");
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            throw ConfigError(where() + "duplicate key '" + std::string(key) + "'");
        seen.emplace_back(key);
        try {
            apply_setting(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where() + e.what());
        }
    }
    validate(cfg);
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

}  // namespace gaugeline
