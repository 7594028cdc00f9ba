#include "gaugeline/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gaugeline/errors.hpp"
#include "gaugeline/parallel.hpp"
#include "gaugeline/units.hpp"

namespace gaugeline {

namespace {

void require_finite(double v, const char* what, double t_ns) {
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << what << " is not finite at t = " << t_ns << " ns";
        throw NonFiniteError(os.str());
    }
}

// Exponent of omega_G carried by the slowly varying envelope.
double envelope_power(Background b) { return b == Background::multipolar ? -0.5 : 0.5; }

}  // namespace

std::string_view to_string(Background b) {
    switch (b) {
        case Background::multipolar: return "multipolar";
        case Background::minimal_coupling: return "minimal";
    }
    return "?";
}

Background parse_background(std::string_view name) {
    if (name == "multipolar") return Background::multipolar;
    if (name == "minimal" || name == "minimal_coupling") return Background::minimal_coupling;
    throw ConfigError("background: expected multipolar or minimal, got '" + std::string(name) + "'");
}

double CouplingModel::magnitude(double omega_k_eV, double omega_G_eV, double mass_eV) const {
    if (!(omega_k_eV > 0.0) || !(omega_G_eV > 0.0)) throw DomainError("coupling: frequencies must be positive");
    const double base = units::pi * units::constants().fine_structure_alpha / mass_eV;
    const double ratio = background == Background::multipolar ? omega_k_eV / omega_G_eV : omega_G_eV / omega_k_eV;
    return scale * std::sqrt(base * ratio);
}

double unperturbed_omega_eV(const SystemConfig& cfg) {
    const double A = units::coulomb_coupling();
    const double k = 4.0 * A / (cfg.l_nm * cfg.l_nm * cfg.l_nm);
    return units::constants().hbar_c * std::sqrt(k / cfg.electron_mass_eV);
}

// ---------------------------------------------------------------- detuning

Detuning::Detuning(std::span<const HarmonicParams> series, const SystemConfig& cfg, bool berry_correction) {
    if (series.size() < 3) throw DomainError("detuning: need at least three samples");
    gauge_ = series.front().gauge;
    reference_ = unperturbed_omega_eV(cfg);
    const ClusterTrajectory traj(cfg);
    const double hc = units::constants().hbar_c;

    std::vector<double> t, d, w;
    t.reserve(series.size());
    d.reserve(series.size());
    w.reserve(series.size());
    for (const auto& hp : series) {
        double delta = hp.omega_eV;
        if (berry_correction && gauge_ != Gauge::multipolar) {
            // -e d_x d_t A evaluated through the cluster curvature: the
            // Lienard-Wiechert vector potential is beta times the Lorentz
            // scalar potential, and the Coulomb-gauge A follows from the
            // invariance of E.
            const double L = traj.position_nm(hp.t_ns);
            const double vl = cluster_curvature(Gauge::lorentz, cfg, hp.x0_nm, L);
            double q = cfg.beta * cfg.beta * vl;
            if (gauge_ == Gauge::coulomb) q -= vl - cluster_curvature(Gauge::coulomb, cfg, hp.x0_nm, L);
            delta -= q * hc * hc / (2.0 * hp.mass_eV * hp.omega_eV);
        }
        require_finite(delta, "Delta", hp.t_ns);
        require_finite(hp.omega_eV, "omega", hp.t_ns);
        t.push_back(hp.t_ns);
        d.push_back(delta - reference_);
        w.push_back(hp.omega_eV - reference_);
    }
    delta_offset_ = CubicSpline(t, d);
    omega_offset_ = CubicSpline(t, w);
}

double Detuning::residual_phase(double t_ns) const {
    return units::energy_to_rate_per_ns(delta_offset_.integral(t_ns));
}

double Detuning::dynamic_phase(double t_ns) const {
    const double t0 = start_ns();
    return -units::energy_to_rate_per_ns(reference_ * (t_ns - t0) + omega_offset_.integral(t_ns));
}

double Detuning::berry_phase(double t_ns) const {
    return -units::energy_to_rate_per_ns(delta_offset_.integral(t_ns) - omega_offset_.integral(t_ns));
}

Detuning detuning(std::span<const HarmonicParams> series, const SystemConfig& cfg, bool berry_correction) {
    return Detuning(series, cfg, berry_correction);
}

// ---------------------------------------------------------------- decay

double decay_rate(double delta_eV, double omega_G_eV, double mass_eV, const CouplingModel& coupling) {
    const double g = coupling.magnitude(delta_eV, omega_G_eV, mass_eV);
    return delta_eV * delta_eV * g * g / (4.0 * units::pi);
}

DecayTrajectory::DecayTrajectory(std::vector<DecayState> states, CubicSpline rate_per_ns)
    : states_(std::move(states)), rate_(std::move(rate_per_ns)) {}

double DecayTrajectory::c1(double t_ns) const { return std::exp(-rate_.integral(t_ns)); }

DecayTrajectory evolve_c1(const Detuning& det, const CouplingModel& coupling, double mass_eV,
                          std::span<const double> time_grid_ns) {
    if (time_grid_ns.size() < 3) throw DomainError("evolve_c1: need at least three time knots");
    std::vector<double> rate;
    rate.reserve(time_grid_ns.size());
    for (double t : time_grid_ns) {
        const double g = decay_rate(det.delta_eV(t), det.omega_eV(t), mass_eV, coupling);
        require_finite(g, "Gamma", t);
        rate.push_back(units::energy_to_rate_per_ns(g));
    }
    CubicSpline spline(time_grid_ns, rate);
    std::vector<DecayState> states;
    states.reserve(time_grid_ns.size());
    for (double t : time_grid_ns) {
        DecayState s;
        s.t_ns = t;
        s.c1 = std::exp(-spline.integral(t));
        s.theta_phase = det.dynamic_phase(t);
        s.berry_phase = det.berry_phase(t);
        states.push_back(s);
    }
    return DecayTrajectory(std::move(states), std::move(spline));
}

// ---------------------------------------------------------------- modes

ModeAccumulator::ModeAccumulator(const Detuning& det, const DecayTrajectory& decay, const CouplingModel& coupling,
                                 double mass_eV, std::span<const TimeSegment> segments, double t_f_ns,
                                 double omega_ref_per_s)
    : detuning_(&det), decay_(&decay), coupling_(coupling), mass_eV_(mass_eV) {
    if (t_f_ns > det.end_ns() * (1.0 + 1e-12)) throw DomainError("mode accumulator: t_f beyond the trajectory");
    omega_ref_per_s_ =
        omega_ref_per_s > 0.0 ? omega_ref_per_s : units::energy_to_angular_frequency(det.reference_eV());
    detuning_ref_per_s_ = units::energy_to_angular_frequency(det.reference_eV());

    std::vector<filon::Segment> segs;
    segs.reserve(segments.size());
    for (const auto& s : segments) segs.push_back({s.start_ns, s.step_ns, s.panels});
    panels_ = filon::PanelSet(filon::clip_segments(segs, t_f_ns), [this](double t) { return envelope(t); });
}

cplx ModeAccumulator::envelope(double t_ns) const {
    const double w = detuning_->omega_eV(t_ns);
    const double u = std::pow(w, envelope_power(coupling_.background));
    // The constant offset between the detuning reference and omega_ref is a
    // pure linear phase; integrate() folds it into the Filon frequency.
    const cplx e = u * decay_->c1(t_ns) * std::polar(1.0, -detuning_->residual_phase(t_ns));
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) require_finite(NAN, "mode envelope", t_ns);
    return e;
}

cplx ModeAccumulator::integrate(const filon::PanelSet& panels, double omega_k_per_s) const {
    // exp(-i s (t - t0)) from the reference offset s, taken out of the
    // envelope. Both differences are exact in double precision, so nu does not
    // depend on omega_ref at all.
    const double shift_per_s = detuning_ref_per_s_ - omega_ref_per_s_;
    const double s = shift_per_s * 1e-9;
    const double nu = ((omega_k_per_s - omega_ref_per_s_) - shift_per_s) * 1e-9;  // rad / ns
    const double wk = units::angular_frequency_to_energy(omega_k_per_s);
    const double g0 = coupling_.scale *
                      std::sqrt(units::pi * units::constants().fine_structure_alpha / mass_eV_) *
                      std::pow(wk, -envelope_power(coupling_.background));
    // The time origin of the Filon phase is t = 0, matching omega_k t.
    const double dt_nat = units::ns_to_inverse_energy(1.0);
    return cplx(0.0, -1.0) * g0 * dt_nat * std::polar(1.0, s * detuning_->start_ns()) * panels.integrate(nu);
}

cplx ModeAccumulator::amplitude(double omega_k_per_s) const {
    if (!(omega_k_per_s > 0.0)) throw DomainError("mode frequency must be positive");
    const cplx c = integrate(panels_, omega_k_per_s);
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw NonFiniteError("mode amplitude is not finite");
    return c;
}

std::vector<cplx> ModeAccumulator::amplitudes(std::span<const double> omega, unsigned workers) const {
    std::vector<cplx> out(omega.size());
    parallel_for(omega.size(), workers, [&](std::size_t i) { out[i] = amplitude(omega[i]); });
    return out;
}

void ModeAccumulator::check_resolution(std::span<const double> omega, double rel_tol) const {
    const auto finer = panels_.halved([this](double t) { return envelope(t); });
    double scale = 0.0, worst = 0.0, at = 0.0;
    for (double w : omega) {
        const cplx a = integrate(panels_, w);
        const cplx b = integrate(finer, w);
        scale = std::max(scale, std::abs(a));
        if (std::abs(a - b) > worst) {
            worst = std::abs(a - b);
            at = w;
        }
    }
    if (worst > rel_tol * scale) {
        std::ostringstream os;
        os << "mode quadrature not converged: |c(h) - c(h/2)| = " << worst << " at omega = " << at
           << " s^-1 (scale " << scale << ")";
        throw ResolutionError(os.str());
    }
}

cplx accumulate_mode_amplitude(double omega_k_per_s, const Detuning& det, const DecayTrajectory& decay,
                               const CouplingModel& coupling, double mass_eV,
                               std::span<const TimeSegment> segments, double t_f_ns) {
    return ModeAccumulator(det, decay, coupling, mass_eV, segments, t_f_ns).amplitude(omega_k_per_s);
}

// ---------------------------------------------------------------- spectra

std::vector<double> make_omega_grid(const OmegaGridSpec& spec, double default_center_per_s) {
    const double center = spec.center_per_s > 0.0 ? spec.center_per_s : default_center_per_s;
    if (spec.points < 3 || spec.points % 2 == 0) throw ConfigError("omega_points: must be odd and >= 3");
    if (!(spec.half_width_per_s > 0.0) || !(center > spec.half_width_per_s))
        throw ConfigError("omega window: need 0 < half width < center");
    const auto M = static_cast<long>(spec.points / 2);
    const double d = spec.half_width_per_s / static_cast<double>(M);

    std::vector<double> grid;
    long J = 0;
    long f = 1;
    if (spec.insert_factor > 1 && spec.insert_half_width_per_s > 0.0) {
        f = static_cast<long>(spec.insert_factor);
        J = static_cast<long>(std::floor(std::min(spec.insert_half_width_per_s, spec.half_width_per_s) /
                                         (d / static_cast<double>(f)) + 1e-9));
    }
    for (long i = -M; i <= M; ++i)
        if (J == 0 || std::labs(i) * f > J) grid.push_back(center + static_cast<double>(i) * d);
    for (long j = -J; j <= J && J > 0; ++j) grid.push_back(center + static_cast<double>(j) * d / static_cast<double>(f));
    std::sort(grid.begin(), grid.end());
    return grid;
}

double extract_peak(std::span<const double> omega, std::span<const double> S) {
    if (omega.size() != S.size() || omega.size() < 3) throw DomainError("extract_peak: bad input");
    const auto i = static_cast<std::size_t>(std::max_element(S.begin(), S.end()) - S.begin());
    if (i == 0 || i + 1 == S.size()) throw WindowError("spectral peak lies on the edge of the omega window");
    // Parabola through three possibly nonuniform points.
    const double x0 = omega[i - 1], x1 = omega[i], x2 = omega[i + 1];
    const double y0 = S[i - 1], y1 = S[i], y2 = S[i + 1];
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double a = (d12 - d01) / (x2 - x0);
    if (!(a < 0.0)) return x1;
    const double b = d01 - a * (x0 + x1);
    return std::clamp(-b / (2.0 * a), x0, x2);
}

double integrate_spectrum(std::span<const double> omega, std::span<const double> S) {
    double sum = 0.0;
    for (std::size_t i = 1; i < omega.size(); ++i) sum += 0.5 * (S[i] + S[i - 1]) * (omega[i] - omega[i - 1]);
    return sum;
}

EmissionModel::EmissionModel(Gauge gauge, const SystemConfig& cfg, double t_f_ns, const SpectrumOptions& options)
    : gauge_(gauge), cfg_(cfg), options_(options) {
    cfg_.validate();
    grid_ = make_time_grid(cfg_, options_.time_grid, t_f_ns);
    t_f_ = grid_.end_ns();
    const auto times = grid_.times();
    trajectory_ = trajectory_scan(gauge_, cfg_, times);
    detuning_ = Detuning(trajectory_, cfg_, options_.berry_correction);
}

SpectrumResult EmissionModel::spectrum(Background background, std::span<const double> omega_grid) const {
    const CouplingModel coupling{background, options_.coupling_scale};
    const auto times = grid_.times();
    const auto decay = evolve_c1(detuning_, coupling, cfg_.electron_mass_eV, times);
    const ModeAccumulator acc(detuning_, decay, coupling, cfg_.electron_mass_eV, grid_.segments, t_f_,
                              options_.omega_ref_per_s);

    SpectrumResult r;
    r.omega_grid.assign(omega_grid.begin(), omega_grid.end());
    r.t_f_ns = t_f_;
    r.gauge = gauge_;
    r.background = background;
    r.amplitudes = acc.amplitudes(omega_grid, options_.workers);
    r.c1_final = decay.c1(t_f_);

    const double hbar = units::constants().hbar;
    r.S.resize(omega_grid.size());
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
        const double w = units::angular_frequency_to_energy(omega_grid[i]);
        r.S[i] = hbar * w * w * std::norm(r.amplitudes[i]) / (4.0 * units::pi * units::pi);
    }

    if (options_.check_resolution && omega_grid.size() >= 3) {
        const std::size_t n = omega_grid.size();
        const auto imax = static_cast<std::size_t>(std::max_element(r.S.begin(), r.S.end()) - r.S.begin());
        const std::vector<double> probe{omega_grid[0], omega_grid[n / 4], omega_grid[imax], omega_grid[3 * n / 4],
                                        omega_grid[n - 1]};
        acc.check_resolution(probe);
    }
    r.peak_omega = extract_peak(r.omega_grid, r.S);
    r.emitted_probability = integrate_spectrum(r.omega_grid, r.S);
    return r;
}

SpectrumResult spectrum(Gauge gauge, Background background, const SystemConfig& cfg, double t_f_ns,
                        std::span<const double> omega_grid, const SpectrumOptions& options) {
    return EmissionModel(gauge, cfg, t_f_ns, options).spectrum(background, omega_grid);
}

BackgroundComparison compare_backgrounds(Gauge gauge, const SystemConfig& cfg, double t_f_ns,
                                         std::span<const double> omega_grid, const SpectrumOptions& options) {
    const EmissionModel model(gauge, cfg, t_f_ns, options);
    BackgroundComparison c;
    c.multipolar = model.spectrum(Background::multipolar, omega_grid);
    c.minimal_coupling = model.spectrum(Background::minimal_coupling, omega_grid);
    c.difference.resize(omega_grid.size());
    for (std::size_t i = 0; i < omega_grid.size(); ++i) c.difference[i] = c.multipolar.S[i] - c.minimal_coupling.S[i];
    c.peak_shift = c.multipolar.peak_omega - c.minimal_coupling.peak_omega;
    return c;
}

}  // namespace gaugeline
