#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gaugeline/errors.hpp"
#include "gaugeline/potentials.hpp"
#include "gaugeline/units.hpp"

using namespace gaugeline;

namespace {

constexpr Gauge all_gauges[] = {Gauge::lorentz, Gauge::coulomb, Gauge::multipolar};

double analytic_omega(const SystemConfig& cfg) {
    const double A = units::coulomb_coupling();
    return units::constants().hbar_c * std::sqrt(4.0 * A / (cfg.electron_mass_eV * std::pow(cfg.l_nm, 3)));
}

std::vector<double> transit_times(const SystemConfig& cfg) { return make_time_grid(cfg, TimeGridSpec{}, 0.0).times(); }

}  // namespace

TEST_CASE("defaults and validation") {
    SystemConfig cfg;
    CHECK(cfg.cluster_count == 1e12);
    CHECK(cfg.beta == 0.1);
    CHECK(cfg.l_nm == 6.33);
    CHECK(cfg.Y_nm == doctest::Approx(6.33e6));
    CHECK(cfg.span_in_Y == 100.0);
    CHECK_NOTHROW(cfg.validate());
    cfg.beta = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.beta = 0.1;
    cfg.cluster_count = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("cluster trajectory") {
    SystemConfig cfg;
    const ClusterTrajectory tr(cfg);
    CHECK(tr.position_nm(0.0) == doctest::Approx(-100.0 * cfg.Y_nm));
    CHECK(tr.position_nm(tr.duration_ns()) == doctest::Approx(100.0 * cfg.Y_nm));
    CHECK(tr.position_nm(tr.t_mid_ns()) == 0.0);
    // T = 200 Y / (beta c)
    CHECK(tr.duration_ns() == doctest::Approx(200.0 * 6.33e6 / (0.1 * 2.99792458e8)).epsilon(1e-14));
    CHECK(tr.duration_ns() == doctest::Approx(42.229).epsilon(1e-4));
}

TEST_CASE("scalar potential closed forms") {
    SystemConfig free;
    free.cluster_count = 0.0;
    for (auto g : {Gauge::lorentz, Gauge::coulomb}) CHECK(scalar_potential(g, free, 0.0, 3.0) == doctest::Approx(0.45497).epsilon(1e-5));
    // The multipolar reconstruction's constant term uses the same closed form.
    CHECK(scalar_potential(Gauge::multipolar, free, 0.0, 3.0) == doctest::Approx(0.45497).epsilon(1e-5));

    CHECK_THROWS_AS(scalar_potential(Gauge::lorentz, free, 6.33, 0.0), DomainError);
    CHECK_THROWS_AS(scalar_potential(Gauge::coulomb, free, -7.0, 0.0), DomainError);

    SUBCASE("beta = 0: Lorentz and Coulomb coincide") {
        SystemConfig cfg;
        cfg.beta = 0.0;
        for (double x : {-5.0, -0.3, 0.0, 1.7, 6.0})
            for (double t : {0.0, 1.0, 10.0}) CHECK(scalar_potential(Gauge::lorentz, cfg, x, t) == scalar_potential(Gauge::coulomb, cfg, x, t));
    }
    SUBCASE("closest approach: Lorentz cluster term is 1/sqrt(1 - beta^2) times Coulomb") {
        SystemConfig cfg;
        const double t = ClusterTrajectory(cfg).t_mid_ns();
        const double cl = scalar_potential(Gauge::lorentz, cfg, 0.0, t) - scalar_potential(Gauge::lorentz, free, 0.0, t);
        const double cc = scalar_potential(Gauge::coulomb, cfg, 0.0, t) - scalar_potential(Gauge::coulomb, free, 0.0, t);
        CHECK(cl / cc == doctest::Approx(1.005038).epsilon(1e-6));
        CHECK(cl / cc == doctest::Approx(1.0 / std::sqrt(1.0 - 0.01)).epsilon(1e-9));
    }
}

TEST_CASE("potential difference matches the plain difference where cancellation is harmless") {
    SystemConfig cfg;
    cfg.cluster_count = 1e3;  // small offset
    for (auto g : {Gauge::lorentz, Gauge::coulomb})
        for (double x : {-3.0, 0.5, 4.0}) {
            const double t = 20.9;
            const double direct = scalar_potential(g, cfg, x, t) - scalar_potential(g, cfg, 0.2, t);
            CHECK(potential_difference(g, cfg, x, 0.2, t) == doctest::Approx(direct).epsilon(1e-10));
        }
}

TEST_CASE("quadratic fit: N = 0 closed form") {
    SystemConfig free;
    free.cluster_count = 0.0;
    for (auto g : all_gauges) {
        const auto hp = quadratic_fit(g, free, 5.0, 0.3);
        CHECK(std::abs(hp.x0_nm) < 1e-12);
        CHECK(hp.omega_eV == doctest::Approx(0.041601).epsilon(2e-5));
        CHECK(hp.omega_eV == doctest::Approx(analytic_omega(free)).epsilon(1e-13));
        CHECK(units::energy_to_angular_frequency(hp.omega_eV) == doctest::Approx(6.320e13).epsilon(5e-4));
        // within 0.5% of the quoted 6.3369e13
        CHECK(std::abs(units::energy_to_angular_frequency(hp.omega_eV) / 6.3369e13 - 1.0) < 5e-3);
    }
}

TEST_CASE("quadratic fit invariants along the default transit") {
    SystemConfig cfg;
    const auto times = transit_times(cfg);
    const double hc = units::constants().hbar_c;
    for (auto g : all_gauges) {
        const auto scan = trajectory_scan(g, cfg, times);
        REQUIRE(scan.size() == times.size());
        for (const auto& hp : scan) {
            REQUIRE(hp.k_eV_per_nm2 > 0.0);
            REQUIRE(std::abs(hp.x0_nm) < cfg.l_nm);
            const double m_omega2 = hp.mass_eV * hp.omega_eV * hp.omega_eV / (hc * hc);
            REQUIRE(std::abs(m_omega2 / hp.k_eV_per_nm2 - 1.0) <= 1e-12);
            // the gauge gradient vanishes at x0
            REQUIRE(std::abs(expansion_coefficients(g, cfg, hp.x0_nm, ClusterTrajectory(cfg).position_nm(hp.t_ns)).gradient) <
                    1e-10);
        }
    }
}

TEST_CASE("beta = 0: all gauges agree") {
    SystemConfig cfg;
    cfg.beta = 0.0;
    cfg.cluster_count = 3e15;  // visible displacement
    for (double L : {-3.0 * cfg.Y_nm, -0.4 * cfg.Y_nm, 0.0, 0.7 * cfg.Y_nm, 2.0 * cfg.Y_nm}) {
        const auto ref = quadratic_fit_at(Gauge::multipolar, cfg, L, 0.0);
        CHECK(std::abs(ref.x0_nm) >= 1e-3 * (L != 0.0));
        for (auto g : {Gauge::lorentz, Gauge::coulomb}) {
            const auto hp = quadratic_fit_at(g, cfg, L, 0.0);
            CHECK(hp.x0_nm == doctest::Approx(ref.x0_nm).epsilon(1e-12));
            CHECK(hp.k_eV_per_nm2 == doctest::Approx(ref.k_eV_per_nm2).epsilon(1e-12));
            CHECK(hp.omega_eV == doctest::Approx(ref.omega_eV).epsilon(1e-12));
        }
    }
}

TEST_CASE("closest approach: x0 = 0 and gauges differ only through (1 - beta^2)") {
    SystemConfig cfg;
    const double t = ClusterTrajectory(cfg).t_mid_ns();
    const auto L = quadratic_fit(Gauge::lorentz, cfg, t, 0.0);
    const auto M = quadratic_fit(Gauge::multipolar, cfg, t, 0.0);
    CHECK(std::abs(L.x0_nm) < 1e-12);
    CHECK(std::abs(M.x0_nm) < 1e-12);
    // cluster curvature at u = 0 is s N A / b^3; multipolar carries one more (1 - beta^2)
    const double ratio = cluster_curvature(Gauge::multipolar, cfg, 0.0, 0.0) / cluster_curvature(Gauge::lorentz, cfg, 0.0, 0.0);
    CHECK(ratio == doctest::Approx(1.0 - cfg.beta * cfg.beta).epsilon(1e-13));
    const double fixed = 4.0 * units::coulomb_coupling() / std::pow(cfg.l_nm, 3);
    CHECK(L.k_eV_per_nm2 - fixed == doctest::Approx(cluster_curvature(Gauge::lorentz, cfg, 0.0, 0.0)).epsilon(1e-6));

    // grid minimisation of the full Lorentz potential finds the same point
    double best_x = 0.0, best_v = 1e300;
    for (int i = -2000; i <= 2000; ++i) {
        const double x = 1e-4 * i;
        const double v = potential_difference(Gauge::lorentz, cfg, x, 0.0, t);
        if (v < best_v) {
            best_v = v;
            best_x = x;
        }
    }
    CHECK(std::abs(best_x - L.x0_nm) <= 1e-4);
}

TEST_CASE("trajectory scan: N = 0 is constant") {
    SystemConfig free;
    free.cluster_count = 0.0;
    const auto times = transit_times(free);
    const auto scan = trajectory_scan(Gauge::lorentz, free, times);
    for (const auto& hp : scan) {
        REQUIRE(hp.x0_nm == 0.0);
        REQUIRE(hp.omega_eV == doctest::Approx(analytic_omega(free)).epsilon(1e-14));
    }
}

TEST_CASE("trajectory scan: mirror symmetry about closest approach") {
    SystemConfig cfg;
    const auto times = transit_times(cfg);
    const double T = ClusterTrajectory(cfg).duration_ns();
    REQUIRE(times.front() == 0.0);
    REQUIRE(times.back() == doctest::Approx(T).epsilon(1e-14));
    for (auto g : all_gauges) {
        const auto scan = trajectory_scan(g, cfg, times);
        double xmax = 0.0;
        for (const auto& hp : scan) xmax = std::max(xmax, std::abs(hp.x0_nm));
        const std::size_t n = scan.size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = scan[i];
            const auto& b = scan[n - 1 - i];
            REQUIRE(std::abs(a.t_ns + b.t_ns - T) <= 1e-12 * T);
            REQUIRE(std::abs(a.x0_nm + b.x0_nm) <= 1e-10 * xmax);
            REQUIRE(std::abs(a.omega_eV - b.omega_eV) <= 1e-10 * a.omega_eV);
        }
    }
}

TEST_CASE("trajectory scan: equilibrium excursion is of order 0.6 nm") {
    SystemConfig cfg;
    const auto times = transit_times(cfg);
    const auto scan = trajectory_scan(Gauge::multipolar, cfg, times);
    const auto it = std::max_element(scan.begin(), scan.end(),
                                     [](const auto& a, const auto& b) { return std::abs(a.x0_nm) < std::abs(b.x0_nm); });
    CHECK(std::abs(it->x0_nm) > 0.3);
    CHECK(std::abs(it->x0_nm) < 1.2);

    // The Lorentz equilibrium at the same instant is the minimum of the full
    // point-charge potential on a fine grid.
    const auto L = quadratic_fit(Gauge::lorentz, cfg, it->t_ns, it->x0_nm);
    double best_x = 0.0, best_v = 1e300;
    for (int i = -10000; i <= 10000; ++i) {
        const double x = 1e-4 * i;
        const double v = potential_difference(Gauge::lorentz, cfg, x, 0.0, it->t_ns);
        if (v < best_v) {
            best_v = v;
            best_x = x;
        }
    }
    CHECK(std::abs(best_x - L.x0_nm) <= 1e-4);
}

TEST_CASE("multipolar equilibrium is the zero-field point") {
    SystemConfig cfg;
    const ClusterTrajectory tr(cfg);
    for (double dt : {-0.5, -0.2, -0.05, 0.1, 0.3}) {
        const double t = tr.t_mid_ns() + dt;
        const double L = tr.position_nm(t);
        const auto hp = quadratic_fit(Gauge::multipolar, cfg, t, 0.0);
        const double force = electron_force_from_fields(cfg, hp.x0_nm, L);
        // compare with the size of the restoring force one oscillator width away
        const double scale = hp.k_eV_per_nm2 * 1.0;
        CHECK(std::abs(force) <= 1e-10 * scale);
        CHECK(std::abs(expansion_coefficients(Gauge::multipolar, cfg, hp.x0_nm, L).gradient + force) <= 1e-10 * scale);
    }
}

TEST_CASE("curvature matches a finite-difference second derivative of the potential") {
    SystemConfig cfg;
    const ClusterTrajectory tr(cfg);
    const double h = 0.01;
    for (auto g : {Gauge::lorentz, Gauge::coulomb})
        for (double dt : {-0.4, -0.1, 0.0, 0.15}) {
            const double t = tr.t_mid_ns() + dt;
            const auto hp = quadratic_fit(g, cfg, t, 0.0);
            const double x = hp.x0_nm;
            const auto V = [&](double s) { return potential_difference(g, cfg, x + s, x, t); };
            const double d2 = (-V(2 * h) + 16 * V(h) - 30 * V(0) + 16 * V(-h) - V(-2 * h)) / (12 * h * h);
            CHECK(d2 == doctest::Approx(hp.k_eV_per_nm2).epsilon(1e-8));
        }
}

TEST_CASE("root finder errors") {
    SUBCASE("two symmetric minima equidistant from the guess") {
        SystemConfig cfg;
        cfg.cluster_charge_sign = -1;
        cfg.cluster_count = 1e19;  // repulsive cluster overwhelms the fixed-charge curvature at x = 0
        CHECK(find_equilibria(Gauge::lorentz, cfg, 0.0).size() == 2);
        CHECK_THROWS_AS(quadratic_fit_at(Gauge::lorentz, cfg, 0.0, 0.0), MultipleRootsError);
        // an off-centre guess selects the nearer minimum
        const auto hp = quadratic_fit_at(Gauge::lorentz, cfg, 0.0, 0.5);
        CHECK(hp.x0_nm > 0.0);
    }
    SUBCASE("guess outside the trap") {
        SystemConfig cfg;
        CHECK_THROWS_AS(quadratic_fit(Gauge::lorentz, cfg, 0.0, 7.0), DomainError);
    }
}

TEST_CASE("time grid") {
    SystemConfig cfg;
    const ClusterTrajectory tr(cfg);
    const auto grid = make_time_grid(cfg, TimeGridSpec{}, 0.0);
    REQUIRE(grid.segments.size() == 3);
    CHECK(grid.end_ns() == doctest::Approx(tr.duration_ns()).epsilon(1e-14));
    const double h = tr.duration_ns() / 4000.0;
    CHECK(grid.segments[0].step_ns == doctest::Approx(h));
    CHECK(grid.segments[1].step_ns == doctest::Approx(h / 100.0));
    // refined window covers |L| <= 5 Y
    const double w = 5.0 * cfg.Y_nm / tr.velocity_nm_per_ns();
    CHECK(grid.segments[1].start_ns <= tr.t_mid_ns() - w);
    CHECK(grid.segments[2].start_ns >= tr.t_mid_ns() + w);
    // shorter window keeps the per-transit coarse step and shortens the last panel
    const auto half = make_time_grid(cfg, TimeGridSpec{}, 10.0);
    CHECK(half.end_ns() == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(half.segments.front().step_ns == doctest::Approx(h));
    // beta = 0 needs an explicit window
    SystemConfig still = cfg;
    still.beta = 0.0;
    CHECK_THROWS_AS(make_time_grid(still, TimeGridSpec{}, 0.0), ConfigError);
    CHECK(make_time_grid(still, TimeGridSpec{}, 2.0).end_ns() == doctest::Approx(2.0));
}
