// dynamics.hpp — Weisskopf-Wigner decay of the excited instantaneous state,
// accumulation of the emitted photon-mode amplitudes, and the transient
// emission spectrum.
//
// Conventions. Photon modes carry the reduced measure
//     ∫ d^3k / (2pi)^3  ->  (1 / 4pi^2) ∫ omega^2 d omega,
// the coupling of the excited level to mode omega_k is g(omega_k, t) with
//     |g|^2 = pi alpha omega_k / (m omega_G)    (multipolar background)
//     |g|^2 = pi alpha omega_G / (m omega_k)    (minimal coupling)
// and the amplitude decay rate is Gamma = Delta^2 |g(Delta)|^2 / (4 pi)
// (half-delta Markov limit), i.e. alpha omega^2 / (4 m) on resonance. The
// population decays at 2 Gamma.

#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaugeline/filon.hpp"
#include "gaugeline/potentials.hpp"
#include "gaugeline/spline.hpp"

namespace gaugeline {

using cplx = std::complex<double>;

enum class Background { multipolar, minimal_coupling };

std::string_view to_string(Background b);
Background parse_background(std::string_view name);

struct CouplingModel {
    Background background = Background::multipolar;
    double scale = 1.0;  // multiplies g; 1 is physical

    // |g(omega_k, t)| in eV^-1/2 given the instantaneous level spacing.
    double magnitude(double omega_k_eV, double omega_G_eV, double mass_eV) const;
};

// sqrt(4 alpha hbar c / (m l^3)) expressed in eV: the cluster-free oscillator.
double unperturbed_omega_eV(const SystemConfig& cfg);

// Delta_G(t) = E1 - E0 - i<1|1'> + i<0|0'>. The multipolar eigenfunctions are
// real, so Delta_M = omega_M. For the Lorentz and Coulomb gauges the PZW
// phase factor contributes -e d_x d_t A(x0) / (2 gamma^2); it is only included
// when `berry_correction` is set.
class Detuning {
public:
    Detuning() = default;
    Detuning(std::span<const HarmonicParams> series, const SystemConfig& cfg, bool berry_correction);

    Gauge gauge() const { return gauge_; }
    double reference_eV() const { return reference_; }
    double delta_eV(double t_ns) const { return reference_ + delta_offset_(t_ns); }
    double omega_eV(double t_ns) const { return reference_ + omega_offset_(t_ns); }
    // ∫_0^t (Delta - reference) ds, rad.
    double residual_phase(double t_ns) const;
    // theta_1 - theta_0 = -∫ omega, rad.
    double dynamic_phase(double t_ns) const;
    // gamma_1 - gamma_0 = -∫ (Delta - omega), rad.
    double berry_phase(double t_ns) const;
    double start_ns() const { return delta_offset_.knots().front(); }
    double end_ns() const { return delta_offset_.knots().back(); }

private:
    Gauge gauge_ = Gauge::multipolar;
    double reference_ = 0.0;
    CubicSpline delta_offset_;  // Delta - reference, eV
    CubicSpline omega_offset_;  // omega - reference, eV
};

Detuning detuning(std::span<const HarmonicParams> series, const SystemConfig& cfg, bool berry_correction = false);

// Gamma_G(t) in eV.
double decay_rate(double delta_eV, double omega_G_eV, double mass_eV, const CouplingModel& coupling);

struct DecayState {
    double t_ns = 0.0;
    cplx c1{1.0, 0.0};
    double theta_phase = 0.0;
    double berry_phase = 0.0;
};

class DecayTrajectory {
public:
    DecayTrajectory() = default;
    DecayTrajectory(std::vector<DecayState> states, CubicSpline rate_per_ns);

    std::span<const DecayState> states() const { return states_; }
    // c1(t) = exp(-∫_0^t Gamma).
    double c1(double t_ns) const;
    double rate_per_ns(double t_ns) const { return rate_(t_ns); }

private:
    std::vector<DecayState> states_;
    CubicSpline rate_;  // Gamma, rad / ns
};

DecayTrajectory evolve_c1(const Detuning& detuning, const CouplingModel& coupling, double mass_eV,
                          std::span<const double> time_grid_ns);

// c_{0,k}(t_f) = -i ∫_0^{t_f} g*(omega_k, t) c1(t) exp(i[omega_k t - ∫Delta]) dt
// for many omega_k. The integrand is split as a slow envelope times
// exp(i (omega_k - omega_ref) t) and integrated with Filon panels.
class ModeAccumulator {
public:
    ModeAccumulator(const Detuning& detuning, const DecayTrajectory& decay, const CouplingModel& coupling,
                    double mass_eV, std::span<const TimeSegment> segments, double t_f_ns,
                    double omega_ref_per_s = 0.0);

    // Amplitude in eV^-3/2.
    cplx amplitude(double omega_k_per_s) const;
    std::vector<cplx> amplitudes(std::span<const double> omega_per_s, unsigned workers) const;

    // Halving-consistency of the panel quadrature at the given frequencies.
    // Throws ResolutionError when |c(h) - c(h/2)| exceeds rel_tol times the
    // largest |c| among the samples.
    void check_resolution(std::span<const double> omega_per_s, double rel_tol = 1e-6) const;

    double omega_ref_per_s() const { return omega_ref_per_s_; }

private:
    cplx envelope(double t_ns) const;
    cplx integrate(const filon::PanelSet& panels, double omega_k_per_s) const;

    const Detuning* detuning_;
    const DecayTrajectory* decay_;
    CouplingModel coupling_;
    double mass_eV_;
    double omega_ref_per_s_;
    double detuning_ref_per_s_;  // detuning reference as an angular frequency
    filon::PanelSet panels_;
};

cplx accumulate_mode_amplitude(double omega_k_per_s, const Detuning& detuning, const DecayTrajectory& decay,
                               const CouplingModel& coupling, double mass_eV,
                               std::span<const TimeSegment> segments, double t_f_ns);

struct OmegaGridSpec {
    double center_per_s = 0.0;  // 0: the unperturbed frequency
    double half_width_per_s = 2.0 * 3.14159265358979323846 * 3e9;
    std::size_t points = 24001;
    double insert_half_width_per_s = 2.0 * 3.14159265358979323846 * 150e6;
    std::size_t insert_factor = 10;
};

std::vector<double> make_omega_grid(const OmegaGridSpec& spec, double default_center_per_s);

struct SpectrumOptions {
    TimeGridSpec time_grid;
    double coupling_scale = 1.0;
    bool berry_correction = false;
    unsigned workers = 1;
    bool check_resolution = true;
    double omega_ref_per_s = 0.0;  // 0: the unperturbed frequency
};

struct SpectrumResult {
    std::vector<double> omega_grid;  // s^-1
    std::vector<cplx> amplitudes;    // c_{0,k}(t_f), eV^-3/2
    std::vector<double> S;           // per unit angular frequency, s
    double t_f_ns = 0.0;
    Gauge gauge = Gauge::multipolar;
    Background background = Background::multipolar;
    double peak_omega = 0.0;           // s^-1
    double emitted_probability = 0.0;
    double c1_final = 1.0;
};

// Quadratic interpolation through the maximum of S and its two neighbours.
// Throws WindowError when the maximum sits on the grid boundary.
double extract_peak(std::span<const double> omega, std::span<const double> S);

// Trapezoid rule of S over the grid.
double integrate_spectrum(std::span<const double> omega, std::span<const double> S);

// Trajectory scan and detuning of one external gauge, shared by spectra
// under either background.
class EmissionModel {
public:
    EmissionModel(Gauge gauge, const SystemConfig& cfg, double t_f_ns, const SpectrumOptions& options);

    Gauge gauge() const { return gauge_; }
    double t_f_ns() const { return t_f_; }
    const TimeGrid& time_grid() const { return grid_; }
    const std::vector<HarmonicParams>& trajectory() const { return trajectory_; }
    const Detuning& detuning() const { return detuning_; }

    SpectrumResult spectrum(Background background, std::span<const double> omega_grid) const;

private:
    Gauge gauge_;
    SystemConfig cfg_;
    SpectrumOptions options_;
    double t_f_;
    TimeGrid grid_;
    std::vector<HarmonicParams> trajectory_;
    Detuning detuning_;
};

// t_f_ns <= 0 selects one full transit.
SpectrumResult spectrum(Gauge gauge, Background background, const SystemConfig& cfg, double t_f_ns,
                        std::span<const double> omega_grid, const SpectrumOptions& options = {});

struct BackgroundComparison {
    SpectrumResult multipolar;
    SpectrumResult minimal_coupling;
    std::vector<double> difference;  // S_multipolar - S_minimal, pointwise
    double peak_shift = 0.0;         // peak_multipolar - peak_minimal, s^-1
};

BackgroundComparison compare_backgrounds(Gauge gauge, const SystemConfig& cfg, double t_f_ns,
                                         std::span<const double> omega_grid, const SpectrumOptions& options = {});

}  // namespace gaugeline
