// units.hpp — physical constants and the internal unit system
//
// Internally everything runs in natural units (hbar = c = 1) with energies in
// eV and lengths in nm, the two being tied together through hbar*c. Times are
// carried in ns at API boundaries. Frequencies are reported as angular
// frequencies in s^-1.

#pragma once

namespace gaugeline::units {

struct PhysicalConstants {
    double fine_structure_alpha;
    double hbar_c;          // eV nm
    double electron_mass;   // eV (rest energy)
    double speed_of_light;  // nm / ns
    double hbar;            // eV s
};

// CODATA 2018. hbar and c are exact in the 2019 SI, so hbar_c / hbar == c to
// double precision.
inline constexpr PhysicalConstants codata2018{
    7.2973525693e-3,
    197.32698045930246,
    510998.95000,
    2.99792458e8,
    6.582119569509067e-16,
};

inline constexpr const PhysicalConstants& constants() { return codata2018; }

enum class InternalSystem { natural_eV_nm };
enum class FrequencyConvention { angular_per_second };

struct UnitPolicy {
    InternalSystem internal_system = InternalSystem::natural_eV_nm;
    FrequencyConvention reporting_frequency_convention = FrequencyConvention::angular_per_second;
};

inline constexpr double pi = 3.14159265358979323846;

// E / hbar, in s^-1.
double energy_to_angular_frequency(double energy_eV);
double angular_frequency_to_energy(double omega_per_s);

// L / (hbar c), in eV^-1.
double length_to_inverse_energy(double length_nm);
double inverse_energy_to_length(double inv_energy);

// e^2 / 4pi = alpha * hbar c, in eV nm.
double coulomb_coupling();

// Energy in eV expressed as an angular rate in rad/ns.
double energy_to_rate_per_ns(double energy_eV);
double rate_per_ns_to_energy(double rate_per_ns);

// Time in ns expressed in natural units (eV^-1).
double ns_to_inverse_energy(double t_ns);

}  // namespace gaugeline::units
