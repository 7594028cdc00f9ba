// potentials.hpp — gauge-dependent scalar potential of the two fixed charges
// plus the passing cluster, the instantaneous equilibrium, and the harmonic
// parameters extracted from the second-order expansion.
//
// Geometry: the electron lives on the x axis between two fixed negative
// charges at x = -l and x = +l. A point cluster of N unit charges moves along
// the line y = Y with speed beta*c; its x coordinate is L(t). All potentials
// are reported as electron potential energies q*phi (q = -e) in eV.

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gaugeline {

enum class Gauge { lorentz, coulomb, multipolar };

std::string_view to_string(Gauge g);
Gauge parse_gauge(std::string_view name);

struct SystemConfig {
    double cluster_count = 1e12;
    double beta = 0.1;
    double l_nm = 6.33;
    double Y_nm = 6.33e6;
    double span_in_Y = 100.0;
    double electron_mass_eV = 510998.95;
    int cluster_charge_sign = +1;  // +1 protons, -1 electrons

    // Throws ConfigError on a violated invariant.
    void validate() const;
};

// L(t) = v (t - t_mid). t = 0 is the cluster at -span*Y, t = T at +span*Y.
// At beta = 0 the cluster is parked at closest approach and the transit
// duration is undefined (duration_ns() returns 0).
class ClusterTrajectory {
public:
    explicit ClusterTrajectory(const SystemConfig& cfg);

    double position_nm(double t_ns) const { return velocity_ * (t_ns - t_mid_); }
    double velocity_nm_per_ns() const { return velocity_; }
    double t_mid_ns() const { return t_mid_; }
    double duration_ns() const { return duration_; }

private:
    double velocity_ = 0.0;
    double t_mid_ = 0.0;
    double duration_ = 0.0;
};

struct HarmonicParams {
    Gauge gauge = Gauge::multipolar;
    double t_ns = 0.0;
    double x0_nm = 0.0;
    double k_eV_per_nm2 = 0.0;
    double omega_eV = 0.0;
    double phi0_eV = 0.0;  // q*phi at x0; dynamically inert
    double mass_eV = 0.0;
};

// First and second x-derivatives of the electron potential energy, as given
// by the gauge's expansion coefficients.
struct ExpansionCoefficients {
    double gradient;   // eV / nm
    double curvature;  // eV / nm^2
};

ExpansionCoefficients expansion_coefficients(Gauge gauge, const SystemConfig& cfg, double x_nm,
                                             double cluster_position_nm);

// Curvature contributed by the cluster alone (eV / nm^2).
double cluster_curvature(Gauge gauge, const SystemConfig& cfg, double x_nm, double cluster_position_nm);

// Exact point-charge closed form for Lorentz and Coulomb gauges; the
// quadratic reconstruction about the instantaneous equilibrium for the
// multipolar gauge. Throws DomainError for |x| >= l.
double scalar_potential(Gauge gauge, const SystemConfig& cfg, double x_nm, double t_ns);

// V(x) - V(x_ref) at the same instant, evaluated without forming the large
// cluster offset (~N alpha hbar c / Y) and subtracting it.
double potential_difference(Gauge gauge, const SystemConfig& cfg, double x_nm, double x_ref_nm, double t_ns);

// Closed-form multipolar-free check: x component of the electric field of the
// boosted point cluster plus the fixed charges, multiplied by the electron
// charge (i.e. the force on the electron, eV / nm).
double electron_force_from_fields(const SystemConfig& cfg, double x_nm, double cluster_position_nm);

HarmonicParams quadratic_fit(Gauge gauge, const SystemConfig& cfg, double t_ns, double x0_guess_nm);

// Same as quadratic_fit with the cluster position given directly.
HarmonicParams quadratic_fit_at(Gauge gauge, const SystemConfig& cfg, double cluster_position_nm,
                                double x0_guess_nm, double t_ns = 0.0);

// Every local minimum of the gauge potential in (-l, l), ascending.
std::vector<double> find_equilibria(Gauge gauge, const SystemConfig& cfg, double cluster_position_nm);

std::vector<HarmonicParams> trajectory_scan(Gauge gauge, const SystemConfig& cfg,
                                            std::span<const double> time_grid_ns);

// Uniform-step pieces of a time grid. Knots are start + i*step for
// i = 0..panels; consecutive segments share their boundary knot.
struct TimeSegment {
    double start_ns;
    double step_ns;
    std::size_t panels;
};

struct TimeGridSpec {
    std::size_t coarse_intervals = 4000;   // over one full transit
    std::size_t refine_factor = 100;
    double refine_half_width_Y = 5.0;      // central window |L(t)| <= this * Y
};

struct TimeGrid {
    std::vector<TimeSegment> segments;
    std::vector<double> times() const;
    double end_ns() const;
};

// Coarse grid over [0, t_end] with the central window refined. The coarse
// step is the transit duration over coarse_intervals (t_end over
// coarse_intervals when beta = 0); the panel straddling t_end is shortened.
// t_end <= 0 selects one transit, for which the grid is symmetric about t_mid.
TimeGrid make_time_grid(const SystemConfig& cfg, const TimeGridSpec& spec, double t_end_ns);

}  // namespace gaugeline
