#include <doctest.h>

#include <cmath>
#include <numeric>

#include "gaugeline/errors.hpp"
#include "gaugeline/oracle.hpp"
#include "gaugeline/oscillator.hpp"
#include "gaugeline/units.hpp"

using namespace gaugeline;
using namespace gaugeline::oracle;

namespace {

double gamma_of(const HarmonicParams& hp) { return instantaneous_state(0, hp).gamma_per_nm; }

SystemConfig free_config() {
    SystemConfig c;
    c.cluster_count = 0.0;
    return c;
}

}  // namespace

TEST_CASE("grid validation") {
    const SystemConfig cfg;
    const auto g = default_grid(cfg);
    CHECK(g.x_min_nm == doctest::Approx(-0.95 * cfg.l_nm));
    CHECK(g.x_max_nm == doctest::Approx(0.95 * cfg.l_nm));
    CHECK_NOTHROW(validate(g, cfg, PotentialModel::full));
    CHECK_THROWS_AS(validate(GridSpec{-0.99 * cfg.l_nm, 0.5, 101}, cfg, PotentialModel::full), ConfigError);
    CHECK_THROWS_AS(validate(GridSpec{-1.0, 1.0, 2}, cfg, PotentialModel::full), ConfigError);
    CHECK_THROWS_AS(validate(GridSpec{1.0, -1.0, 101}, cfg, PotentialModel::full), ConfigError);
    // the harmonic model has no singularities, so a wide grid is fine
    const auto hp = quadratic_fit(Gauge::lorentz, cfg, 0.0, 0.0);
    const auto wide = harmonic_grid(hp);
    CHECK(wide.x_max_nm - wide.x_min_nm == doctest::Approx(20.0 / gamma_of(hp)).epsilon(1e-12));
    CHECK_NOTHROW(validate(wide, cfg, PotentialModel::harmonic));
}

TEST_CASE("tridiagonal solver on a harmonic well") {
    const double m = 510998.95;
    const auto hp = quadratic_fit(Gauge::multipolar, free_config(), 0.0, 0.0);
    const auto spec = harmonic_grid(hp, 10.0, 2001);
    const auto sys = solve_tridiagonal(spec, m, [&](double x) { return 0.5 * hp.k_eV_per_nm2 * (x - hp.x0_nm) * (x - hp.x0_nm); }, 3);
    REQUIRE(sys.energies_eV.size() == 3);
    CHECK(sys.energies_eV[0] == doctest::Approx(0.5 * hp.omega_eV).epsilon(1e-4));
    CHECK(sys.energies_eV[1] - sys.energies_eV[0] == doctest::Approx(hp.omega_eV).epsilon(1e-4));
    CHECK(sys.energies_eV[2] - sys.energies_eV[1] == doctest::Approx(hp.omega_eV).epsilon(1e-4));
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) {
            const double dot = std::inner_product(sys.vectors[a].begin(), sys.vectors[a].end(), sys.vectors[b].begin(), 0.0);
            CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-10));
        }
}

TEST_CASE("grid eigensolve: harmonic gap, convergence order, refinement guard") {
    const auto free = free_config();
    const auto hp = quadratic_fit(Gauge::lorentz, free, 0.0, 0.0);
    const auto r = grid_eigensolve(Gauge::lorentz, free, 0.0, harmonic_grid(hp), PotentialModel::harmonic);
    CHECK(std::abs(r.gap_eV / hp.omega_eV - 1.0) < 1e-8);
    CHECK(std::abs(r.gap_coarse_eV / hp.omega_eV - 1.0) > std::abs(r.gap_eV / hp.omega_eV - 1.0));
    CHECK(convergence_order(Gauge::lorentz, free, 0.0, harmonic_grid(hp, 10.0, 1001), PotentialModel::harmonic) ==
          doctest::Approx(2.0).epsilon(0.1));
    CHECK_THROWS_AS(grid_eigensolve(Gauge::lorentz, free, 0.0, harmonic_grid(hp, 10.0, 21), PotentialModel::harmonic),
                    DiscretizationError);
}

TEST_CASE("full potential at N = 0: anharmonic excess regression") {
    const auto free = free_config();
    const auto r = grid_eigensolve(Gauge::lorentz, free, 0.0, default_grid(free));
    const double excess = r.gap_eV / r.harmonic.omega_eV - 1.0;
    CHECK(std::abs(excess / anharmonic_baseline - 1.0) < anharmonic_baseline_tolerance);
    // the leading quartic correction 3 lambda / (gamma^4 omega)
    const double lambda = 2.0 * units::coulomb_coupling() / std::pow(free.l_nm, 5);
    const double g2 = std::pow(gamma_of(r.harmonic), 2);
    CHECK(excess == doctest::Approx(3.0 * lambda / (g2 * g2 * r.harmonic.omega_eV)).epsilon(0.05));
}

TEST_CASE("finite-difference dH/dt") {
    const SystemConfig cfg;
    const double t = ClusterTrajectory(cfg).t_mid_ns();
    SUBCASE("agrees with the closed form at closest approach") {
        const auto hp = quadratic_fit(Gauge::lorentz, cfg, t, 0.0);
        const auto fd = finite_difference_hdot(Gauge::lorentz, cfg, t, 1e-4, harmonic_grid(hp));
        const auto times = make_time_grid(cfg, TimeGridSpec{}, 0.0).times();
        const auto closed = adiabaticity_parameter(trajectory_scan(Gauge::lorentz, cfg, times));
        REQUIRE(std::abs(closed.argmax_t_ns - t) < 1e-3);
        CHECK(fd.r01 == doctest::Approx(closed.max_r01).epsilon(0.01));
        CHECK(fd.r01 < 1e-2);
    }
    SUBCASE("vanishes without the cluster") {
        const auto free = free_config();
        const auto hp = quadratic_fit(Gauge::coulomb, free, t, 0.0);
        CHECK(finite_difference_hdot(Gauge::coulomb, free, t, 1e-4, harmonic_grid(hp)).r01 <= 1e-12);
    }
    SUBCASE("a curvature-only change does not connect levels of opposite parity") {
        const auto free = free_config();
        const auto base = quadratic_fit(Gauge::multipolar, free, 0.0, 0.0);
        auto params_at = [&](double s) {
            auto hp = base;
            hp.k_eV_per_nm2 *= 1.0 + 1e-3 * s;
            hp.omega_eV = units::constants().hbar_c * std::sqrt(hp.k_eV_per_nm2 / hp.mass_eV);
            return hp;
        };
        const auto fd = finite_difference_hdot(params_at, 0.0, 1e-2, harmonic_grid(base));
        const double g2 = std::pow(gamma_of(base), 2);
        // the same dk/dt couples 0 and 2 with strength k'/(2 sqrt(2) gamma^2)
        const double scale = 1e-3 * base.k_eV_per_nm2 / (4.0 * g2);
        CHECK(fd.matrix_element_eV_per_ns <= 1e-8 * scale);
    }
}

TEST_CASE("photon-number-conserving transitions stay at the adiabatic bound") {
    const SystemConfig cfg;
    const auto times = make_time_grid(cfg, TimeGridSpec{}, 0.0).times();
    const auto series = trajectory_scan(Gauge::lorentz, cfg, times);
    const auto b = nonadiabatic_bound(series, times.front(), times.back());
    CHECK(b.max_r01 == doctest::Approx(adiabaticity_parameter(series).max_r01).epsilon(0.01));
    CHECK(b.max_c0 > 0.0);
    CHECK(b.max_c0 <= 10.0 * b.max_r01);
    const auto free = free_config();
    const auto flat = trajectory_scan(Gauge::lorentz, free, times);
    CHECK(nonadiabatic_bound(flat, times.front(), times.back()).max_c0 == 0.0);
}

TEST_CASE("discrete-mode bath reproduces the Markov decay") {
    const auto free = free_config();
    DiscreteModeSpec spec;
    spec.omega0_eV = unperturbed_omega_eV(free);
    const auto r = discrete_mode_evolution(spec);
    CHECK(r.fitted_rate_per_ns == doctest::Approx(2.0 * r.gamma_per_ns).epsilon(0.05));
    CHECK(r.max_norm_drift < 1e-6);
    CHECK(r.c1_abs2.front() == doctest::Approx(1.0));
    for (std::size_t i = 1; i < r.c1_abs2.size(); ++i) REQUIRE(r.c1_abs2[i] <= r.c1_abs2[i - 1] + 1e-9);
    // emitted probability closes with the surviving population
    double emitted = 0.0;
    for (std::size_t i = 0; i < r.final_amplitudes.size(); ++i) emitted += std::norm(r.final_amplitudes[i]) * r.mode_weight[i];
    CHECK(emitted + r.c1_abs2.back() == doctest::Approx(1.0).epsilon(1e-6));
    spec.t_max_in_gamma = 50.0;
    CHECK_THROWS_AS(discrete_mode_evolution(spec), DomainError);
}

TEST_CASE("single-mode Rabi oscillation") {
    const auto r = rabi_oscillation(2.0);
    CHECK(r.analytic_period_ns == doctest::Approx(units::pi / 2.0));
    CHECK(r.measured_period_ns == doctest::Approx(r.analytic_period_ns).epsilon(1e-6));
    CHECK(r.max_norm_drift < 1e-8);
}
