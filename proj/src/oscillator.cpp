#include "gaugeline/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "gaugeline/errors.hpp"
#include "gaugeline/spline.hpp"
#include "gaugeline/units.hpp"

namespace gaugeline {

namespace {

double hermite(int n, double z) {
    if (n == 0) return 1.0;
    double hm = 1.0;
    double h = 2.0 * z;
    for (int k = 1; k < n; ++k) {
        const double next = 2.0 * z * h - 2.0 * k * hm;
        hm = h;
        h = next;
    }
    return h;
}

double gamma_per_nm(const HarmonicParams& hp) {
    return std::sqrt(hp.mass_eV * hp.omega_eV) / units::constants().hbar_c;
}

std::vector<double> r01_series(std::span<const HarmonicParams> series, std::size_t stride) {
    std::vector<double> t, x;
    for (std::size_t i = 0; i < series.size(); i += stride) {
        t.push_back(series[i].t_ns);
        x.push_back(series[i].x0_nm);
    }
    if (t.back() != series.back().t_ns) {
        t.push_back(series.back().t_ns);
        x.push_back(series.back().x0_nm);
    }
    const CubicSpline spline(t, x);
    std::vector<double> r(series.size());
    for (std::size_t i = 0; i < series.size(); ++i)
        r[i] = r01_from_velocity(spline.derivative(series[i].t_ns), series[i]);
    return r;
}

}  // namespace

double InstantaneousState::wavefunction(double x) const {
    const double z = gamma_per_nm * (x - x0_nm);
    return norm * std::exp(-0.5 * z * z) * hermite(n, z);
}

InstantaneousState instantaneous_state(int n, const HarmonicParams& hp) {
    if (n < 0) throw DomainError("instantaneous_state: negative level");
    InstantaneousState s;
    s.n = n;
    s.gamma_per_nm = gamma_per_nm(hp);
    s.x0_nm = hp.x0_nm;
    s.gauge = hp.gauge;
    s.t_ns = hp.t_ns;
    double factorial = 1.0;
    for (int k = 2; k <= n; ++k) factorial *= k;
    s.norm = std::sqrt(s.gamma_per_nm / (std::sqrt(units::pi) * std::ldexp(1.0, n) * factorial));
    return s;
}

double eigenenergy(int n, const HarmonicParams& hp) {
    if (n < 0) throw DomainError("eigenenergy: negative level");
    return (n + 0.5) * hp.omega_eV;
}

double position_matrix_element(int n, int m, const HarmonicParams& hp) {
    if (n < 0 || m < 0) throw DomainError("position_matrix_element: negative level");
    if (std::abs(n - m) != 1) return 0.0;
    return std::sqrt(static_cast<double>(std::max(n, m))) / (std::sqrt(2.0) * gamma_per_nm(hp));
}

double r01_from_velocity(double x0_dot, const HarmonicParams& hp) {
    // Closed form |k x0_dot <0|x-x0|1>| / omega^2, reduced with k = m omega^2.
    const double v = x0_dot / units::constants().speed_of_light;
    return std::abs(v) * std::sqrt(hp.mass_eV / (2.0 * hp.omega_eV));
}

AdiabaticityReport adiabaticity_parameter(std::span<const HarmonicParams> series) {
    if (series.size() < 5) throw GridTooCoarseError("adiabaticity_parameter: need at least 5 samples");
    AdiabaticityReport rep;
    rep.gauge = series.front().gauge;

    const auto r = r01_series(series, 1);
    rep.samples.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        rep.samples.emplace_back(series[i].t_ns, r[i]);
        if (r[i] > rep.max_r01) {
            rep.max_r01 = r[i];
            rep.argmax_t_ns = series[i].t_ns;
        }
    }

    if (rep.max_r01 > 0.0) {
        const auto coarse = r01_series(series, 2);
        const double coarse_max = *std::max_element(coarse.begin(), coarse.end());
        if (std::abs(coarse_max - rep.max_r01) > 0.01 * rep.max_r01)
            throw GridTooCoarseError("adiabaticity_parameter: peak r01 changes by more than 1% under grid halving");
    }
    return rep;
}

}  // namespace gaugeline
