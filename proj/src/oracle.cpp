#include "gaugeline/oracle.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "gaugeline/errors.hpp"
#include "gaugeline/spline.hpp"
#include "gaugeline/units.hpp"

namespace gaugeline::oracle {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<cplx>;

GridSpec refined(const GridSpec& spec) { return {spec.x_min_nm, spec.x_max_nm, 2 * spec.n_points - 1}; }

std::function<double(double)> potential_for(Gauge gauge, const SystemConfig& cfg, double t_ns,
                                            const HarmonicParams& hp, PotentialModel model) {
    if (model == PotentialModel::harmonic) {
        return [x0 = hp.x0_nm, k = hp.k_eV_per_nm2](double x) { return 0.5 * k * (x - x0) * (x - x0); };
    }
    return [gauge, cfg, t_ns, x0 = hp.x0_nm](double x) { return potential_difference(gauge, cfg, x, x0, t_ns); };
}

double gap(const GridEigensystem& s) { return s.energies_eV[1] - s.energies_eV[0]; }

}  // namespace

GridSpec default_grid(const SystemConfig& cfg, std::size_t n_points) {
    return {-0.95 * cfg.l_nm, 0.95 * cfg.l_nm, n_points};
}

GridSpec harmonic_grid(const HarmonicParams& hp, double widths, std::size_t n_points) {
    const double gamma = std::sqrt(hp.mass_eV * hp.omega_eV) / units::constants().hbar_c;
    const double half = widths / gamma;
    return {hp.x0_nm - half, hp.x0_nm + half, n_points};
}

void validate(const GridSpec& spec, const SystemConfig& cfg, PotentialModel model) {
    if (!(spec.x_min_nm < spec.x_max_nm)) throw ConfigError("oracle grid: x_min must be below x_max");
    if (spec.n_points < 3) throw ConfigError("oracle grid: need at least 3 points");
    if (model == PotentialModel::full) {
        const double limit = cfg.l_nm - 0.05 * cfg.l_nm;
        if (spec.x_min_nm < -limit * (1.0 + 1e-12) || spec.x_max_nm > limit * (1.0 + 1e-12))
            throw ConfigError("oracle grid: must stay 0.05 l away from the fixed charges");
    }
}

GridEigensystem solve_tridiagonal(const GridSpec& spec, double mass_eV, const std::function<double(double)>& potential,
                                  int count) {
    const auto n = static_cast<lapack_int>(spec.n_points);
    if (count < 1 || count > n) throw DomainError("solve_tridiagonal: bad eigenpair count");
    const double h = (spec.x_max_nm - spec.x_min_nm) / static_cast<double>(n - 1);
    const double hc = units::constants().hbar_c;
    const double t = hc * hc / (2.0 * mass_eV * h * h);

    GridEigensystem out;
    out.x_nm.resize(static_cast<std::size_t>(n));
    std::vector<double> d(static_cast<std::size_t>(n)), e(static_cast<std::size_t>(n), -t);
    for (lapack_int i = 0; i < n; ++i) {
        const double x = spec.x_min_nm + static_cast<double>(i) * h;
        out.x_nm[static_cast<std::size_t>(i)] = x;
        // Dirichlet ends sit one step outside the grid.
        d[static_cast<std::size_t>(i)] = 2.0 * t + potential(x);
    }
    std::vector<double> w(static_cast<std::size_t>(n));
    std::vector<double> z(static_cast<std::size_t>(n) * static_cast<std::size_t>(count));
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(count));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, 1, count,
                                           0.0, &found, w.data(), z.data(), n, isuppz.data());
    if (info != 0 || found != count) {
        std::ostringstream os;
        os << "tridiagonal eigensolve failed (info " << info << ", found " << found << ")";
        throw ConvergenceError(os.str());
    }
    for (int j = 0; j < count; ++j) {
        out.energies_eV.push_back(w[static_cast<std::size_t>(j)]);
        std::vector<double> v(z.begin() + static_cast<std::ptrdiff_t>(j) * n,
                              z.begin() + static_cast<std::ptrdiff_t>(j + 1) * n);
        // Sign convention: positive overlap with (x - centre)^j near the peak.
        double s = 0.0;
        const double c = 0.5 * (spec.x_min_nm + spec.x_max_nm);
        for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * std::pow(out.x_nm[i] - c, j);
        if (s < 0.0)
            for (double& a : v) a = -a;
        out.vectors.push_back(std::move(v));
    }
    return out;
}

GridEigenResult grid_eigensolve(Gauge gauge, const SystemConfig& cfg, double t_ns, const GridSpec& spec,
                                PotentialModel model) {
    validate(spec, cfg, model);
    GridEigenResult r;
    r.gauge = gauge;
    r.model = model;
    r.t_ns = t_ns;
    r.harmonic = quadratic_fit(gauge, cfg, t_ns, 0.0);
    const auto V = potential_for(gauge, cfg, t_ns, r.harmonic, model);
    r.coarse = solve_tridiagonal(spec, cfg.electron_mass_eV, V, 3);
    const auto fine = solve_tridiagonal(refined(spec), cfg.electron_mass_eV, V, 3);
    r.fine_energies_eV = fine.energies_eV;
    r.gap_coarse_eV = gap(r.coarse);
    r.gap_fine_eV = gap(fine);
    r.gap_eV = (4.0 * r.gap_fine_eV - r.gap_coarse_eV) / 3.0;
    const double rel = std::abs(r.gap_eV - r.gap_fine_eV) / std::abs(r.gap_eV);
    if (!(rel <= 1e-6)) {
        std::ostringstream os;
        os << "grid eigensolve: Richardson estimate and fine grid differ by " << rel << " relative";
        throw DiscretizationError(os.str());
    }
    return r;
}

double convergence_order(Gauge gauge, const SystemConfig& cfg, double t_ns, const GridSpec& spec,
                         PotentialModel model) {
    validate(spec, cfg, model);
    const auto hp = quadratic_fit(gauge, cfg, t_ns, 0.0);
    const auto V = potential_for(gauge, cfg, t_ns, hp, model);
    const GridSpec s2 = refined(spec);
    const GridSpec s3 = refined(s2);
    const double g1 = gap(solve_tridiagonal(spec, cfg.electron_mass_eV, V, 2));
    const double g2 = gap(solve_tridiagonal(s2, cfg.electron_mass_eV, V, 2));
    const double g3 = gap(solve_tridiagonal(s3, cfg.electron_mass_eV, V, 2));
    return std::log2(std::abs((g1 - g2) / (g2 - g3)));
}

HdotResult finite_difference_hdot(const std::function<HarmonicParams(double)>& params_at, double t_ns, double dt_ns,
                                  const GridSpec& spec, double noise_floor) {
    if (!(dt_ns > 0.0)) throw DomainError("finite_difference_hdot: dt must be positive");
    if (spec.n_points < 3 || !(spec.x_min_nm < spec.x_max_nm)) throw ConfigError("oracle grid: malformed");
    const HarmonicParams hp = params_at(t_ns);
    const auto harmonic = [](const HarmonicParams& p) {
        return [x0 = p.x0_nm, k = p.k_eV_per_nm2](double x) { return 0.5 * k * (x - x0) * (x - x0); };
    };
    const auto sys = solve_tridiagonal(spec, hp.mass_eV, harmonic(hp), 2);

    double scale = 0.0;
    const auto element = [&](double dt) {
        const auto vp = harmonic(params_at(t_ns + dt));
        const auto vm = harmonic(params_at(t_ns - dt));
        double s = 0.0;
        for (std::size_t i = 0; i < sys.x_nm.size(); ++i) {
            const double dv = (vp(sys.x_nm[i]) - vm(sys.x_nm[i])) / (2.0 * dt);
            scale = std::max(scale, std::abs(dv));
            s += sys.vectors[0][i] * dv * sys.vectors[1][i];
        }
        return std::abs(s);
    };

    HdotResult r;
    r.matrix_element_eV_per_ns = element(dt_ns);
    r.halved_eV_per_ns = element(0.5 * dt_ns);
    r.omega_eV = hp.omega_eV;
    const double m_nat = units::rate_per_ns_to_energy(r.matrix_element_eV_per_ns);
    r.r01 = m_nat / (hp.omega_eV * hp.omega_eV);

    const double big = std::max(r.matrix_element_eV_per_ns, r.halved_eV_per_ns);
    if (big > noise_floor * scale) {
        const double change = std::abs(r.matrix_element_eV_per_ns - r.halved_eV_per_ns) / big;
        if (change > 0.01) {
            std::ostringstream os;
            os << "finite_difference_hdot: halving dt changes the element by " << change * 100.0 << "%";
            throw ResolutionError(os.str());
        }
    }
    return r;
}

HdotResult finite_difference_hdot(Gauge gauge, const SystemConfig& cfg, double t_ns, double dt_ns,
                                  const GridSpec& spec) {
    const double guess = quadratic_fit(gauge, cfg, t_ns, 0.0).x0_nm;
    return finite_difference_hdot([&](double s) { return quadratic_fit(gauge, cfg, s, guess); }, t_ns, dt_ns,
                                  spec);
}

// ---------------------------------------------------------------- modes

namespace {

struct Recorder {
    std::vector<double>* t;
    std::vector<double>* c1;
    double* drift;
    void operator()(const State& s, double time) const {
        t->push_back(time);
        c1->push_back(std::norm(s[0]));
        double norm = 0.0;
        for (const auto& a : s) norm += std::norm(a);
        *drift = std::max(*drift, std::abs(norm - 1.0));
    }
};

template <class System, class Observer>
void integrate_samples(System sys, State& x, double t_end, std::size_t samples, double rel_tol, Observer obs) {
    auto stepper = odeint::make_dense_output(rel_tol * 1e-2, rel_tol, odeint::runge_kutta_dopri5<State>());
    const double dt = t_end / static_cast<double>(samples - 1);
    try {
        odeint::integrate_const(stepper, sys, x, 0.0, t_end, dt, obs);
    } catch (const odeint::step_adjustment_error& e) {
        throw ConvergenceError(std::string("discrete-mode integration: ") + e.what());
    } catch (const odeint::no_progress_error& e) {
        throw ConvergenceError(std::string("discrete-mode integration: ") + e.what());
    }
}

}  // namespace

DiscreteModeResult discrete_mode_evolution(const DiscreteModeSpec& spec) {
    if (!(spec.omega0_eV > 0.0) || !(spec.spacing_in_gamma > 0.0) || !(spec.half_width_in_gamma > 0.0))
        throw DomainError("discrete_mode_evolution: bad spec");
    const CouplingModel coupling{spec.background, spec.coupling_scale};
    DiscreteModeResult r;
    r.gamma_per_ns = units::energy_to_rate_per_ns(decay_rate(spec.omega0_eV, spec.omega0_eV, spec.mass_eV, coupling));
    r.t_max_ns = spec.t_max_in_gamma / r.gamma_per_ns;

    const double dnu = spec.spacing_in_gamma * r.gamma_per_ns;  // rad / ns
    const double recurrence = 2.0 * units::pi / dnu;
    if (r.t_max_ns > recurrence / 3.0) throw DomainError("discrete_mode_evolution: window exceeds a third of the recurrence time");
    const auto half = static_cast<long>(std::llround(spec.half_width_in_gamma / spec.spacing_in_gamma));
    const double domega_eV = units::rate_per_ns_to_energy(dnu);

    std::vector<double> nu, G;
    for (long j = -half; j <= half; ++j) {
        const double v = static_cast<double>(j) * dnu;
        const double w_eV = spec.omega0_eV + units::rate_per_ns_to_energy(v);
        const double weight = w_eV * w_eV * domega_eV / (4.0 * units::pi * units::pi);
        nu.push_back(v);
        r.mode_omega_per_s.push_back(units::energy_to_angular_frequency(w_eV));
        r.mode_weight.push_back(weight);
        G.push_back(units::energy_to_rate_per_ns(coupling.magnitude(w_eV, spec.omega0_eV, spec.mass_eV) *
                                                 std::sqrt(weight)));
    }
    const std::size_t n = nu.size();

    // x[0] = c1, x[1 + j] = beta_j = b_j exp(-i nu_j t).
    const cplx I(0.0, 1.0);
    auto system = [&](const State& x, State& dx, double) {
        cplx sum(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            sum += G[j] * x[1 + j];
            dx[1 + j] = -I * (nu[j] * x[1 + j] + G[j] * x[0]);
        }
        dx[0] = -I * sum;
    };
    State x(n + 1, cplx(0.0, 0.0));
    x[0] = 1.0;
    integrate_samples(system, x, r.t_max_ns, spec.samples, spec.rel_tolerance,
                      Recorder{&r.t_ns, &r.c1_abs2, &r.max_norm_drift});

    r.final_amplitudes.resize(n);
    for (std::size_t j = 0; j < n; ++j)
        r.final_amplitudes[j] = x[1 + j] * std::polar(1.0, nu[j] * r.t_max_ns) / std::sqrt(r.mode_weight[j]);

    // Least-squares slope of ln|c1|^2 over [0.5, 2.5] / Gamma.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < r.t_ns.size(); ++i) {
        const double g = r.t_ns[i] * r.gamma_per_ns;
        if (g < 0.5 || g > 2.5) continue;
        const double y = std::log(r.c1_abs2[i]);
        sx += r.t_ns[i];
        sy += y;
        sxx += r.t_ns[i] * r.t_ns[i];
        sxy += r.t_ns[i] * y;
        ++m;
    }
    if (m >= 2) {
        const double md = static_cast<double>(m);
        r.fitted_rate_per_ns = -(md * sxy - sx * sy) / (md * sxx - sx * sx);
    }
    return r;
}

RabiResult rabi_oscillation(double coupling_per_ns, double periods) {
    if (!(coupling_per_ns > 0.0) || !(periods >= 2.0)) throw DomainError("rabi_oscillation: bad input");
    RabiResult r;
    r.coupling_per_ns = coupling_per_ns;
    r.analytic_period_ns = units::pi / coupling_per_ns;
    const double G = coupling_per_ns;
    const cplx I(0.0, 1.0);
    auto system = [&](const State& x, State& dx, double) {
        dx[0] = -I * G * x[1];
        dx[1] = -I * G * x[0];
    };
    State x{cplx(1.0, 0.0), cplx(0.0, 0.0)};
    std::vector<double> t, p;
    const auto samples = static_cast<std::size_t>(std::ceil(periods * 2000.0)) + 1;
    integrate_samples(system, x, periods * r.analytic_period_ns, samples, 1e-12, Recorder{&t, &p, &r.max_norm_drift});

    std::vector<double> crossings;
    for (std::size_t i = 1; i < p.size(); ++i)
        if (p[i - 1] > 0.5 && p[i] <= 0.5)
            crossings.push_back(t[i - 1] + (p[i - 1] - 0.5) / (p[i - 1] - p[i]) * (t[i] - t[i - 1]));
    if (crossings.size() < 2) throw ConvergenceError("rabi_oscillation: fewer than two periods resolved");
    r.measured_period_ns = (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
    return r;
}

NonadiabaticBound nonadiabatic_bound(std::span<const HarmonicParams> series, double t_begin_ns, double t_end_ns) {
    std::vector<double> t, x0, w;
    for (const auto& hp : series) {
        if (hp.t_ns < t_begin_ns || hp.t_ns > t_end_ns) continue;
        t.push_back(hp.t_ns);
        x0.push_back(hp.x0_nm);
        w.push_back(hp.omega_eV);
    }
    if (t.size() < 5) throw DomainError("nonadiabatic_bound: need at least five samples in the window");
    NonadiabaticBound out;
    out.gauge = series.front().gauge;
    const double mass = series.front().mass_eV;
    const double hc = units::constants().hbar_c;
    const double w_ref = w.front();
    std::vector<double> dw(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) dw[i] = w[i] - w_ref;
    const CubicSpline xs(t, x0), ws(t, dw);
    const double t0 = t.front();

    // a = <0|d1/dt> = gamma x0' / sqrt(2), rad / ns.
    const auto a_at = [&](double s) {
        const double omega = w_ref + ws(s);
        return std::sqrt(mass * omega) / hc * xs.derivative(s) / std::sqrt(2.0);
    };
    const auto theta_at = [&](double s) { return units::energy_to_rate_per_ns(w_ref * (s - t0) + ws.integral(s)); };
    for (double s : t)
        out.max_r01 = std::max(out.max_r01, std::abs(a_at(s)) / units::energy_to_rate_per_ns(w_ref + ws(s)));

    auto system = [&](const State& x, State& dx, double tau) {
        const double s = t0 + tau;
        const double a = a_at(s);
        const cplx e = std::polar(1.0, theta_at(s));
        dx[0] = -a * x[1] * std::conj(e);
        dx[1] = a * x[0] * e;
    };
    State x{cplx(0.0, 0.0), cplx(1.0, 0.0)};
    struct MaxC0 {
        double* best;
        void operator()(const State& s, double) const { *best = std::max(*best, std::abs(s[0])); }
    };
    const double span = t.back() - t0;
    const auto samples = static_cast<std::size_t>(std::max(1001.0, span * units::energy_to_rate_per_ns(w_ref)));
    integrate_samples(system, x, span, samples, 1e-9, MaxC0{&out.max_c0});
    return out;
}

}  // namespace gaugeline::oracle
