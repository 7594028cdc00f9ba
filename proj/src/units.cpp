#include "gaugeline/units.hpp"

#include <stdexcept>

namespace gaugeline::units {

double energy_to_angular_frequency(double energy_eV) { return energy_eV / constants().hbar; }

double angular_frequency_to_energy(double omega_per_s) { return omega_per_s * constants().hbar; }

double length_to_inverse_energy(double length_nm) {
    if (length_nm < 0.0) throw std::domain_error("length_to_inverse_energy: negative length");
    return length_nm / constants().hbar_c;
}

double inverse_energy_to_length(double inv_energy) { return inv_energy * constants().hbar_c; }

double coulomb_coupling() { return constants().fine_structure_alpha * constants().hbar_c; }

double energy_to_rate_per_ns(double energy_eV) { return energy_eV / constants().hbar * 1e-9; }

double rate_per_ns_to_energy(double rate_per_ns) { return rate_per_ns * 1e9 * constants().hbar; }

double ns_to_inverse_energy(double t_ns) { return t_ns * 1e-9 / constants().hbar; }

}  // namespace gaugeline::units
