// oscillator.hpp — instantaneous eigensystem of the quadratic Hamiltonian and
// the adiabaticity diagnostic r01.

#pragma once

#include <span>
#include <utility>
#include <vector>

#include "gaugeline/potentials.hpp"

namespace gaugeline {

struct InstantaneousState {
    int n = 0;
    double gamma_per_nm = 0.0;  // sqrt(m omega) / (hbar c)
    double x0_nm = 0.0;
    double norm = 0.0;          // [gamma / (sqrt(pi) 2^n n!)]^(1/2), in nm^-1/2
    Gauge gauge = Gauge::multipolar;
    double t_ns = 0.0;

    // Real part of the eigenfunction; the PZW phase factor is not applied
    // (it only carries a recorded gauge tag).
    double wavefunction(double x_nm) const;
};

InstantaneousState instantaneous_state(int n, const HarmonicParams& hp);

// (n + 1/2) omega, eV.
double eigenenergy(int n, const HarmonicParams& hp);

// <n|(x - x0)|m>, nm.
double position_matrix_element(int n, int m, const HarmonicParams& hp);

struct AdiabaticityReport {
    Gauge gauge = Gauge::multipolar;
    std::vector<std::pair<double, double>> samples;  // (t_ns, r01)
    double max_r01 = 0.0;
    double argmax_t_ns = 0.0;
};

// r01(t) = |dx0/dt| sqrt(m / (2 omega)) from cubic-spline differentiation of
// x0(t). Throws GridTooCoarseError when the peak value moves by more than 1%
// between the series and its every-other-sample decimation.
AdiabaticityReport adiabaticity_parameter(std::span<const HarmonicParams> series);

// r01 from a given equilibrium velocity (nm / ns).
double r01_from_velocity(double x0_dot_nm_per_ns, const HarmonicParams& hp);

}  // namespace gaugeline
