#include "gaugeline/runs.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gaugeline/dynamics.hpp"
#include "gaugeline/errors.hpp"
#include "gaugeline/oracle.hpp"
#include "gaugeline/oscillator.hpp"
#include "gaugeline/parallel.hpp"
#include "gaugeline/units.hpp"

#ifndef GAUGELINE_VERSION
#define GAUGELINE_VERSION "unknown"
#endif

namespace gaugeline {

namespace fs = std::filesystem;
using csv::format;

namespace {

fs::path out_root(const RunConfig& cfg) { return cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir); }

std::string name(Gauge g) { return std::string(to_string(g)); }
std::string name(Background b) { return std::string(to_string(b)); }

double omega_per_s(double eV) { return units::energy_to_angular_frequency(eV); }

std::vector<double> time_knots(const RunConfig& cfg) {
    return make_time_grid(cfg.system, cfg.time_grid, cfg.t_f_ns).times();
}

std::vector<double> omega_grid(const RunConfig& cfg) {
    return make_omega_grid(cfg.omega, omega_per_s(unperturbed_omega_eV(cfg.system)));
}

void write_spectrum_csv(const SpectrumResult& r, const fs::path& path, csv::Metadata meta) {
    csv::Table t({"omega_per_s", "S", "re_c0k", "im_c0k"});
    for (std::size_t i = 0; i < r.omega_grid.size(); ++i)
        t.row({format(r.omega_grid[i]), format(r.S[i]), format(r.amplitudes[i].real()), format(r.amplitudes[i].imag())});
    t.write(path);
    meta.emplace_back("t_f_ns_effective", format(r.t_f_ns));
    meta.emplace_back("omega_grid_size", format(static_cast<unsigned long long>(r.omega_grid.size())));
    meta.emplace_back("peak_omega_per_s", format(r.peak_omega));
    meta.emplace_back("emitted_probability", format(r.emitted_probability));
    meta.emplace_back("c1_final", format(r.c1_final));
    csv::write_metadata(fs::path(path).concat(".meta"), meta);
}

struct PeakRowEx : PeakRow {
    double max_r01 = 0.0;
};

std::vector<PeakRowEx> compute_peaks(const RunConfig& cfg, const fs::path& out_dir) {
    const auto grid = omega_grid(cfg);
    const auto options = cfg.spectrum_options();
    std::vector<PeakRowEx> rows;

    const auto emit = [&](const std::string& label, Gauge gauge, const SystemConfig& sys, bool adiabatic) {
        const EmissionModel model(gauge, sys, cfg.t_f_ns, options);
        const double r01 = adiabatic ? adiabaticity_parameter(model.trajectory()).max_r01 : 0.0;
        for (auto bg : cfg.backgrounds) {
            const auto r = model.spectrum(bg, grid);
            PeakRowEx row;
            row.label = label;
            row.background = bg;
            row.peak_omega_per_s = r.peak_omega;
            row.emitted_probability = r.emitted_probability;
            row.c1_final_abs2 = r.c1_final * r.c1_final;
            row.max_r01 = r01;
            rows.push_back(row);
            if (!out_dir.empty()) {
                auto meta = base_metadata(cfg);
                meta.emplace_back("spectrum_gauge", label == "unperturbed" ? "unperturbed" : name(gauge));
                meta.emplace_back("spectrum_background", name(bg));
                if (label == "unperturbed") meta.emplace_back("spectrum_N", "0");
                write_spectrum_csv(r, out_dir / ("spectrum_" + label + "_" + name(bg) + ".csv"), meta);
            }
        }
    };

    for (auto g : cfg.gauges) emit(name(g), g, cfg.system, true);
    if (cfg.system.cluster_count != 0.0) {
        SystemConfig free = cfg.system;
        free.cluster_count = 0.0;
        emit("unperturbed", Gauge::multipolar, free, false);
    }
    return rows;
}

std::vector<PeakRowEx> write_spectrum_artifacts(const RunConfig& cfg, const fs::path& dir) {
    const auto rows = compute_peaks(cfg, dir);
    csv::Table peaks({"label", "background", "peak_omega_per_s", "emitted_probability", "c1_final_abs2"});
    for (const auto& r : rows)
        peaks.row({r.label, name(r.background), format(r.peak_omega_per_s), format(r.emitted_probability),
                   format(r.c1_final_abs2)});
    peaks.write(dir / "peaks.csv");

    csv::Table diff({"first", "second", "background", "difference_per_s"});
    for (auto bg : cfg.backgrounds)
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < rows.size(); ++j) {
                if (i == j || rows[i].background != bg || rows[j].background != bg) continue;
                if (rows[i].label == "unperturbed" || (j < i && rows[j].label != "unperturbed")) continue;
                // unperturbed - gauge for the reference row, first - second otherwise
                const auto& a = rows[j].label == "unperturbed" ? rows[j] : rows[i];
                const auto& b = rows[j].label == "unperturbed" ? rows[i] : rows[j];
                diff.row({a.label, b.label, name(bg), format(a.peak_omega_per_s - b.peak_omega_per_s)});
            }
    diff.write(dir / "peak_differences.csv");
    csv::write_metadata(dir / "peaks.csv.meta", base_metadata(cfg));
    return rows;
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

}  // namespace

std::string version() { return GAUGELINE_VERSION; }

csv::Metadata base_metadata(const RunConfig& cfg) {
    auto meta = cfg.effective();
    meta.emplace_back("code_version", version());
    return meta;
}

int run_trajectory(const RunConfig& cfg) {
    validate(cfg);
    const auto dir = out_root(cfg);
    const auto times = time_knots(cfg);
    std::vector<std::vector<HarmonicParams>> scans;
    for (auto g : cfg.gauges) scans.push_back(trajectory_scan(g, cfg.system, times));
    const auto mp = trajectory_scan(Gauge::multipolar, cfg.system, times);

    csv::Table t({"t_ns", "gauge", "x0_nm", "k_eV_per_nm2", "omega_per_s", "phi0_eV"});
    csv::Table d({"t_ns", "gauge", "dx0_nm", "domega_per_s"});
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (std::size_t g = 0; g < scans.size(); ++g) {
            const auto& hp = scans[g][i];
            t.row({format(hp.t_ns), name(hp.gauge), format(hp.x0_nm), format(hp.k_eV_per_nm2),
                   format(omega_per_s(hp.omega_eV)), format(hp.phi0_eV)});
            if (hp.gauge == Gauge::multipolar) continue;
            d.row({format(hp.t_ns), name(hp.gauge), format(hp.x0_nm - mp[i].x0_nm),
                   format(omega_per_s(hp.omega_eV) - omega_per_s(mp[i].omega_eV))});
        }
    }
    t.write(dir / "trajectory.csv");
    d.write(dir / "trajectory_deviation.csv");
    csv::write_metadata(dir / "trajectory.csv.meta", base_metadata(cfg));
    return 0;
}

int run_adiabaticity(const RunConfig& cfg) {
    validate(cfg);
    const auto dir = out_root(cfg);
    const auto times = time_knots(cfg);
    std::vector<AdiabaticityReport> reports;
    for (auto g : cfg.gauges) reports.push_back(adiabaticity_parameter(trajectory_scan(g, cfg.system, times)));

    csv::Table t({"t_ns", "gauge", "r01"});
    for (std::size_t i = 0; i < times.size(); ++i)
        for (const auto& r : reports) t.row({format(r.samples[i].first), name(r.gauge), format(r.samples[i].second)});
    t.write(dir / "adiabaticity.csv");

    csv::Table s({"gauge", "max_r01", "argmax_t_ns"});
    for (const auto& r : reports) s.row({name(r.gauge), format(r.max_r01), format(r.argmax_t_ns)});
    s.write(dir / "adiabaticity_summary.csv");
    csv::write_metadata(dir / "adiabaticity.csv.meta", base_metadata(cfg));
    return 0;
}

std::vector<PeakRow> spectrum_peaks(const RunConfig& cfg, const fs::path& out_dir) {
    validate(cfg);
    const auto rows = compute_peaks(cfg, out_dir);
    return {rows.begin(), rows.end()};
}

int run_spectrum(const RunConfig& cfg) {
    validate(cfg);
    write_spectrum_artifacts(cfg, out_root(cfg));
    return 0;
}

int run_compare(const RunConfig& cfg) {
    validate(cfg);
    const auto dir = out_root(cfg);
    const auto grid = omega_grid(cfg);
    csv::Table summary({"gauge", "peak_multipolar_per_s", "peak_minimal_per_s", "shift_per_s"});
    for (auto g : cfg.gauges) {
        const auto c = compare_backgrounds(g, cfg.system, cfg.t_f_ns, grid, cfg.spectrum_options());
        csv::Table t({"omega_per_s", "S_multipolar", "S_minimal", "difference"});
        for (std::size_t i = 0; i < grid.size(); ++i)
            t.row({format(grid[i]), format(c.multipolar.S[i]), format(c.minimal_coupling.S[i]), format(c.difference[i])});
        t.write(dir / ("compare_" + name(g) + ".csv"));
        summary.row({name(g), format(c.multipolar.peak_omega), format(c.minimal_coupling.peak_omega),
                     format(c.peak_shift)});
    }
    summary.write(dir / "compare_summary.csv");
    csv::write_metadata(dir / "compare_summary.csv.meta", base_metadata(cfg));
    return 0;
}

std::vector<OracleCheck> oracle_checks(const RunConfig& cfg) {
    validate(cfg);
    const SystemConfig& sys = cfg.system;
    SystemConfig free = sys;
    free.cluster_count = 0.0;
    const ClusterTrajectory traj(sys);
    const double t_mid = traj.t_mid_ns();
    const std::size_t n = cfg.oracle_grid_points;
    std::vector<OracleCheck> out;

    const auto add = [&](std::string check, std::string gauge, double oracle_value, double production, double residual,
                         double bound, bool pass) {
        out.push_back({std::move(check), std::move(gauge), oracle_value, production, residual, bound, pass});
    };
    const auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };

    // Discretization of the harmonic problem itself.
    {
        const auto hp = quadratic_fit(Gauge::multipolar, free, t_mid, 0.0);
        const auto spec = oracle::harmonic_grid(hp, 10.0, n);
        const auto r = oracle::grid_eigensolve(Gauge::multipolar, free, t_mid, spec, oracle::PotentialModel::harmonic);
        const double e = rel(r.gap_eV, hp.omega_eV);
        add("grid_harmonic_gap_N0", "-", r.gap_eV, hp.omega_eV, e, 1e-8, e <= 1e-8);
        const double p = oracle::convergence_order(Gauge::multipolar, free, t_mid, spec, oracle::PotentialModel::harmonic);
        add("grid_convergence_order_harmonic", "-", p, 2.0, std::abs(p - 2.0), 0.2, std::abs(p - 2.0) <= 0.2);
    }
    // Full potentials: convergence and the anharmonic regression baseline.
    {
        const auto spec = oracle::default_grid(sys, n);
        for (auto g : cfg.gauges) {
            const double p = oracle::convergence_order(g, sys, t_mid, spec);
            add("grid_convergence_order_full", name(g), p, 2.0, std::abs(p - 2.0), 0.2, std::abs(p - 2.0) <= 0.2);
        }
        const auto r = oracle::grid_eigensolve(Gauge::lorentz, free, t_mid, oracle::default_grid(free, n));
        const double excess = r.gap_eV / r.harmonic.omega_eV - 1.0;
        const double e = rel(excess, oracle::anharmonic_baseline);
        add("anharmonic_gap_excess_N0", "lorentz", excess, oracle::anharmonic_baseline, e,
            oracle::anharmonic_baseline_tolerance, e <= oracle::anharmonic_baseline_tolerance);
    }
    // Gauge ordering of the level spacing at closest approach.
    {
        const auto full = [&](Gauge g) { return oracle::grid_eigensolve(g, sys, t_mid, oracle::default_grid(sys, n)); };
        const auto harm = [&](Gauge g) {
            const auto hp = quadratic_fit(g, sys, t_mid, 0.0);
            return oracle::grid_eigensolve(g, sys, t_mid, oracle::harmonic_grid(hp, 10.0, n),
                                           oracle::PotentialModel::harmonic);
        };
        const auto order = [&](const std::string& label, const oracle::GridEigenResult& a,
                               const oracle::GridEigenResult& b) {
            const double o = a.gap_eV - b.gap_eV;
            const double p = a.harmonic.omega_eV - b.harmonic.omega_eV;
            const double e = std::abs(o - p) / std::abs(p);
            add(label, name(a.gauge) + "-" + name(b.gauge), o, p, e, 1.0, e < 1.0);
        };
        order("gap_ordering_full", full(Gauge::lorentz), full(Gauge::coulomb));
        const auto hm = harm(Gauge::multipolar);
        order("gap_ordering_harmonic", harm(Gauge::lorentz), hm);
        order("gap_ordering_harmonic", harm(Gauge::coulomb), hm);
    }
    // Adiabaticity: closed form against the finite-difference matrix element.
    {
        const auto times = time_knots(cfg);
        for (auto g : cfg.gauges) {
            const auto scan = trajectory_scan(g, sys, times);
            const auto a = adiabaticity_parameter(scan);
            const auto hp = quadratic_fit(g, sys, a.argmax_t_ns, 0.0);
            const auto fd = oracle::finite_difference_hdot(g, sys, a.argmax_t_ns, 1e-3, oracle::harmonic_grid(hp, 10.0, n));
            const double e = rel(fd.r01, a.max_r01);
            add("hdot_r01_at_peak", name(g), fd.r01, a.max_r01, e, 0.01, e <= 0.01);
            if (cfg.oracle_photon_conserving && traj.velocity_nm_per_ns() > 0.0) {
                const double w = cfg.time_grid.refine_half_width_Y * sys.Y_nm / traj.velocity_nm_per_ns();
                const auto b = oracle::nonadiabatic_bound(scan, t_mid - w, t_mid + w);
                const double ratio = b.max_c0 / b.max_r01;
                add("photon_conserving_c0_over_r01", name(g), b.max_c0, b.max_r01, ratio, 10.0, ratio <= 10.0);
            }
        }
        const auto hp0 = quadratic_fit(Gauge::lorentz, free, t_mid, 0.0);
        const auto fd0 = oracle::finite_difference_hdot(Gauge::lorentz, free, t_mid, 1e-3, oracle::harmonic_grid(hp0, 10.0, n));
        add("hdot_N0", "lorentz", fd0.r01, 0.0, fd0.r01, 1e-12, fd0.r01 <= 1e-12);

        // k modulated with x0 frozen: the perturbation is even about x0.
        const auto k_only = [hp0](double t) {
            HarmonicParams p = hp0;
            p.k_eV_per_nm2 = hp0.k_eV_per_nm2 * (1.0 + 0.1 * std::sin(t));
            return p;
        };
        const auto fdk = oracle::finite_difference_hdot(k_only, 0.3, 1e-3, oracle::harmonic_grid(hp0, 10.0, n));
        const double gamma2 = hp0.mass_eV * hp0.omega_eV / (units::constants().hbar_c * units::constants().hbar_c);
        // Size of the diagonal element k' <0|(x - x0)^2|0> / 2 = k' / (4 gamma^2).
        const double scale = 0.1 * std::cos(0.3) * hp0.k_eV_per_nm2 / (4.0 * gamma2);
        const double e = fdk.matrix_element_eV_per_ns / scale;
        add("hdot_parity_k_only", "-", fdk.matrix_element_eV_per_ns, 0.0, e, 1e-8, e <= 1e-8);
    }
    // Weisskopf-Wigner reduction against the discrete-mode bath.
    for (auto bg : {Background::multipolar, Background::minimal_coupling}) {
        oracle::DiscreteModeSpec ds;
        ds.background = bg;
        ds.omega0_eV = unperturbed_omega_eV(sys);
        ds.mass_eV = sys.electron_mass_eV;
        const auto d = oracle::discrete_mode_evolution(ds);
        const double e = rel(d.fitted_rate_per_ns, 2.0 * d.gamma_per_ns);
        add("discrete_mode_decay_slope", name(bg), d.fitted_rate_per_ns, 2.0 * d.gamma_per_ns, e, 0.05, e <= 0.05);
        add("discrete_mode_norm_drift", name(bg), d.max_norm_drift, 0.0, d.max_norm_drift, 1e-6, d.max_norm_drift <= 1e-6);

        // Same static emitter through the production pipeline.
        SpectrumOptions so;
        so.coupling_scale = ds.coupling_scale;
        so.time_grid = cfg.time_grid;
        const EmissionModel model(Gauge::multipolar, free, d.t_max_ns, so);
        const double w0 = omega_per_s(ds.omega0_eV);
        const double gamma_s = d.gamma_per_ns * 1e9;
        std::vector<double> w;
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < d.mode_omega_per_s.size(); ++j)
            if (std::abs(d.mode_omega_per_s[j] - w0) <= 3.0 * gamma_s * (1.0 + 1e-9)) {
                w.push_back(d.mode_omega_per_s[j]);
                idx.push_back(j);
            }
        const auto r = model.spectrum(bg, w);
        double worst = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            worst = std::max(worst, rel(std::norm(d.final_amplitudes[idx[i]]), std::norm(r.amplitudes[i])));
        add("discrete_mode_lorentzian_3hw", name(bg), worst, 0.0, worst, 0.05, worst <= 0.05);
    }
    {
        const auto r = oracle::rabi_oscillation(2.0);
        const double e = rel(r.measured_period_ns, r.analytic_period_ns);
        add("rabi_period", "-", r.measured_period_ns, r.analytic_period_ns, e, 0.01, e <= 0.01);
    }
    return out;
}

int run_oracle(const RunConfig& cfg) {
    const auto dir = out_root(cfg);
    const auto checks = oracle_checks(cfg);
    csv::Table t({"check", "gauge", "oracle", "production", "residual", "bound", "status"});
    bool ok = true;
    for (const auto& c : checks) {
        t.row({c.name, c.gauge, format(c.oracle), format(c.production), format(c.residual), format(c.bound),
               c.pass ? "pass" : "FAIL"});
        ok = ok && c.pass;
    }
    t.write(dir / "oracle_residuals.csv");

    // Eigenvalue table of the full potentials at closest approach.
    const ClusterTrajectory traj(cfg.system);
    csv::Table e({"gauge", "t_ns", "level", "E_coarse_eV", "E_fine_eV"});
    for (auto g : cfg.gauges) {
        const auto r = oracle::grid_eigensolve(g, cfg.system, traj.t_mid_ns(),
                                               oracle::default_grid(cfg.system, cfg.oracle_grid_points));
        for (std::size_t i = 0; i < r.coarse.energies_eV.size(); ++i)
            e.row({name(g), format(r.t_ns), format(static_cast<unsigned long long>(i)), format(r.coarse.energies_eV[i]),
                   format(r.fine_energies_eV[i])});
    }
    e.write(dir / "oracle_eigenvalues.csv");
    csv::write_metadata(dir / "oracle_residuals.csv.meta", base_metadata(cfg));
    if (!ok) throw BoundViolation("oracle: at least one bound violated (see oracle_residuals.csv)");
    return 0;
}

int run_sweep(const RunConfig& cfg) {
    validate(cfg);
    if (cfg.sweep.empty()) throw ConfigError("sweep: at least one sweep.<param> axis required");
    const auto dir = out_root(cfg);

    // Cartesian product, first axis slowest.
    std::vector<std::vector<std::size_t>> points{{}};
    for (const auto& axis : cfg.sweep) {
        std::vector<std::vector<std::size_t>> next;
        for (const auto& p : points)
            for (std::size_t v = 0; v < axis.values.size(); ++v) {
                auto q = p;
                q.push_back(v);
                next.push_back(std::move(q));
            }
        points = std::move(next);
    }

    struct Outcome {
        std::vector<PeakRowEx> rows;
        std::string error;
    };
    std::vector<Outcome> outcomes(points.size());
    parallel_for(points.size(), cfg.workers, [&](std::size_t i) {
        try {
            RunConfig point = cfg;
            point.sweep.clear();
            point.workers = 1;
            std::string sub;
            for (std::size_t a = 0; a < cfg.sweep.size(); ++a) {
                const auto& axis = cfg.sweep[a];
                apply_setting(point, axis.name, axis.values[points[i][a]]);
                sub += (sub.empty() ? "" : "_") + axis.name + "=" + axis.values[points[i][a]];
            }
            validate(point);
            point.out_dir = (dir / sub).string();
            outcomes[i].rows = write_spectrum_artifacts(point, point.out_dir);
        } catch (const std::exception& e) {
            outcomes[i].error = sanitize(e.what());
        }
    });

    // Lexicographic order of the numeric parameter tuples.
    std::vector<std::size_t> order(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const auto value = [&](std::size_t p, std::size_t a) { return std::stod(cfg.sweep[a].values[points[p][a]]); };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        for (std::size_t a = 0; a < cfg.sweep.size(); ++a) {
            const double vx = value(x, a), vy = value(y, a);
            if (vx != vy) return vx < vy;
        }
        return false;
    });

    std::vector<std::string> header;
    for (const auto& axis : cfg.sweep) header.push_back(axis.name);
    for (const char* h : {"gauge", "peak_omega_per_s", "emitted_probability", "max_r01", "error"}) header.emplace_back(h);
    csv::Table t(header);
    bool ok = true;
    const Background bg = cfg.backgrounds.front();
    for (std::size_t p : order) {
        std::vector<std::string> params;
        for (std::size_t a = 0; a < cfg.sweep.size(); ++a) params.push_back(format(value(p, a)));
        const auto& o = outcomes[p];
        if (!o.error.empty()) {
            ok = false;
            for (auto g : cfg.gauges) {
                auto cells = params;
                cells.insert(cells.end(), {name(g), "", "", "", o.error});
                t.row(cells);
            }
            continue;
        }
        for (const auto& r : o.rows) {
            if (r.label == "unperturbed" || r.background != bg) continue;
            auto cells = params;
            cells.insert(cells.end(), {r.label, format(r.peak_omega_per_s), format(r.emitted_probability),
                                       format(r.max_r01), ""});
            t.row(cells);
        }
    }
    t.write(dir / "sweep_summary.csv");
    auto meta = base_metadata(cfg);
    for (const auto& axis : cfg.sweep) {
        std::string vals;
        for (const auto& v : axis.values) vals += (vals.empty() ? "" : ",") + v;
        meta.emplace_back("sweep." + axis.name, vals);
    }
    csv::write_metadata(dir / "sweep_summary.csv.meta", meta);
    if (!ok) throw Error("sweep: at least one point failed (see sweep_summary.csv)");
    return 0;
}

}  // namespace gaugeline
