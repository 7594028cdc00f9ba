#include "gaugeline/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gaugeline/errors.hpp"
#include "gaugeline/units.hpp"

namespace gaugeline {

namespace {

constexpr int newton_budget = 100;
constexpr double newton_tol_nm = 1e-12;
constexpr std::size_t equilibrium_scan_points = 4001;

// Geometry of the cluster term for a gauge: electron potential energy
// -s N A f / sqrt(u^2 + b2), with u = x - L.
struct ClusterTerm {
    double strength;  // s N A, eV nm
    double b2;        // nm^2
    double factor;    // extra (1 - beta^2) of the multipolar expansion
};

ClusterTerm cluster_term(Gauge gauge, const SystemConfig& cfg) {
    const double contraction = 1.0 - cfg.beta * cfg.beta;
    ClusterTerm c{};
    c.strength = cfg.cluster_charge_sign * cfg.cluster_count * units::coulomb_coupling();
    switch (gauge) {
        case Gauge::lorentz:
            c.b2 = contraction * cfg.Y_nm * cfg.Y_nm;
            c.factor = 1.0;
            break;
        case Gauge::coulomb:
            c.b2 = cfg.Y_nm * cfg.Y_nm;
            c.factor = 1.0;
            break;
        case Gauge::multipolar:
            c.b2 = contraction * cfg.Y_nm * cfg.Y_nm;
            c.factor = contraction;
            break;
    }
    return c;
}

double fixed_potential(const SystemConfig& cfg, double x) {
    const double A = units::coulomb_coupling();
    return A * (1.0 / (cfg.l_nm + x) + 1.0 / (cfg.l_nm - x));
}

void check_domain(const SystemConfig& cfg, double x) {
    if (!(std::abs(x) < cfg.l_nm)) {
        std::ostringstream os;
        os << "position x = " << x << " nm outside the fixed-charge trap (|x| < " << cfg.l_nm << ")";
        throw DomainError(os.str());
    }
}

// Point-charge potential energy of the cluster (Lorentz/Coulomb closed form).
double cluster_potential(const ClusterTerm& c, double x, double L) {
    const double u = x - L;
    return -c.strength / std::sqrt(u * u + c.b2);
}

// -S [1/r(x) - 1/r(xr)] without cancellation.
double cluster_potential_difference(const ClusterTerm& c, double x, double xr, double L) {
    const double u = x - L;
    const double ur = xr - L;
    const double r = std::sqrt(u * u + c.b2);
    const double rr = std::sqrt(ur * ur + c.b2);
    // 1/r - 1/rr = (rr^2 - r^2) / (r rr (r + rr)), rr^2 - r^2 = (xr - x)(xr + x - 2L)
    const double num = (xr - x) * (ur + u);
    return -c.strength * num / (r * rr * (r + rr));
}

double fixed_potential_difference(const SystemConfig& cfg, double x, double xr) {
    // A [2l/(l^2 - x^2) - 2l/(l^2 - xr^2)] = 2lA (x^2 - xr^2) / ((l^2 - x^2)(l^2 - xr^2))
    const double A = units::coulomb_coupling();
    const double l = cfg.l_nm;
    return 2.0 * l * A * (x - xr) * (x + xr) / ((l - x) * (l + x) * (l - xr) * (l + xr));
}

double omega_from_k(double k, double mass_eV) {
    return units::constants().hbar_c * std::sqrt(k / mass_eV);
}

HarmonicParams make_params(Gauge gauge, const SystemConfig& cfg, double x0, double L, double t_ns) {
    const auto coeff = expansion_coefficients(gauge, cfg, x0, L);
    if (!(coeff.curvature > 0.0)) {
        std::ostringstream os;
        os << "equilibrium at x0 = " << x0 << " nm has non-positive curvature " << coeff.curvature;
        throw ConfinementLostError(os.str());
    }
    HarmonicParams hp;
    hp.gauge = gauge;
    hp.t_ns = t_ns;
    hp.x0_nm = x0;
    hp.k_eV_per_nm2 = coeff.curvature;
    hp.mass_eV = cfg.electron_mass_eV;
    hp.omega_eV = omega_from_k(coeff.curvature, cfg.electron_mass_eV);
    // The multipolar constant term is phi_G(x0) of the gauge the PZW factor
    // starts from; the Lorentz closed form is used.
    const Gauge offset_gauge = gauge == Gauge::multipolar ? Gauge::lorentz : gauge;
    hp.phi0_eV = fixed_potential(cfg, x0) + cluster_potential(cluster_term(offset_gauge, cfg), x0, L);
    return hp;
}

// Bisection on the gradient sign change in [a, b] (gradient(a) < 0 < gradient(b)).
double refine_root(Gauge gauge, const SystemConfig& cfg, double L, double a, double b) {
    for (int i = 0; i < 200 && (b - a) > newton_tol_nm; ++i) {
        const double m = 0.5 * (a + b);
        if (expansion_coefficients(gauge, cfg, m, L).gradient < 0.0)
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

}  // namespace

std::string_view to_string(Gauge g) {
    switch (g) {
        case Gauge::lorentz: return "lorentz";
        case Gauge::coulomb: return "coulomb";
        case Gauge::multipolar: return "multipolar";
    }
    return "?";
}

Gauge parse_gauge(std::string_view name) {
    if (name == "lorentz") return Gauge::lorentz;
    if (name == "coulomb") return Gauge::coulomb;
    if (name == "multipolar") return Gauge::multipolar;
    throw ConfigError("unknown gauge '" + std::string(name) + "'");
}

void SystemConfig::validate() const {
    auto fail = [](const std::string& key, const std::string& why) { throw ConfigError(key + ": " + why); };
    if (!(beta >= 0.0 && beta < 1.0)) fail("beta", "must satisfy 0 <= beta < 1");
    if (!(cluster_count >= 0.0) || !std::isfinite(cluster_count)) fail("N", "must be finite and >= 0");
    if (!(l_nm > 0.0) || !std::isfinite(l_nm)) fail("l_nm", "must be > 0");
    if (!(Y_nm > 0.0) || !std::isfinite(Y_nm)) fail("Y", "must be > 0");
    if (!(span_in_Y > 0.0) || !std::isfinite(span_in_Y)) fail("span_Y", "must be > 0");
    if (!(electron_mass_eV > 0.0) || !std::isfinite(electron_mass_eV)) fail("electron_mass_eV", "must be > 0");
    if (cluster_charge_sign != 1 && cluster_charge_sign != -1) fail("cluster_charge_sign", "must be +1 or -1");
}

ClusterTrajectory::ClusterTrajectory(const SystemConfig& cfg) {
    velocity_ = cfg.beta * units::constants().speed_of_light;
    if (velocity_ > 0.0) {
        t_mid_ = cfg.span_in_Y * cfg.Y_nm / velocity_;
        duration_ = 2.0 * t_mid_;
    }
}

ExpansionCoefficients expansion_coefficients(Gauge gauge, const SystemConfig& cfg, double x, double L) {
    const double A = units::coulomb_coupling();
    const double l = cfg.l_nm;
    const double ip = 1.0 / (l + x);
    const double im = 1.0 / (l - x);

    ExpansionCoefficients out{};
    out.gradient = A * (im * im - ip * ip);
    out.curvature = 2.0 * A * (ip * ip * ip + im * im * im);

    const auto c = cluster_term(gauge, cfg);
    if (c.strength != 0.0) {
        const double u = x - L;
        const double r2 = u * u + c.b2;
        const double r = std::sqrt(r2);
        const double ir3 = 1.0 / (r2 * r);
        out.gradient += c.factor * c.strength * u * ir3;
        out.curvature += c.factor * c.strength * (c.b2 - 2.0 * u * u) * ir3 / r2;
    }
    return out;
}

double cluster_curvature(Gauge gauge, const SystemConfig& cfg, double x, double L) {
    const auto c = cluster_term(gauge, cfg);
    const double u = x - L;
    const double r2 = u * u + c.b2;
    return c.factor * c.strength * (c.b2 - 2.0 * u * u) / (r2 * r2 * std::sqrt(r2));
}

double scalar_potential(Gauge gauge, const SystemConfig& cfg, double x, double t_ns) {
    check_domain(cfg, x);
    const double L = ClusterTrajectory(cfg).position_nm(t_ns);
    if (gauge == Gauge::multipolar) {
        const auto hp = quadratic_fit_at(gauge, cfg, L, 0.0, t_ns);
        const double d = x - hp.x0_nm;
        return hp.phi0_eV + 0.5 * hp.k_eV_per_nm2 * d * d;
    }
    return fixed_potential(cfg, x) + cluster_potential(cluster_term(gauge, cfg), x, L);
}

double potential_difference(Gauge gauge, const SystemConfig& cfg, double x, double xr, double t_ns) {
    check_domain(cfg, x);
    check_domain(cfg, xr);
    const double L = ClusterTrajectory(cfg).position_nm(t_ns);
    if (gauge == Gauge::multipolar) {
        const auto hp = quadratic_fit_at(gauge, cfg, L, 0.0, t_ns);
        const double d = x - hp.x0_nm;
        const double dr = xr - hp.x0_nm;
        return 0.5 * hp.k_eV_per_nm2 * (d - dr) * (d + dr);
    }
    return fixed_potential_difference(cfg, x, xr) + cluster_potential_difference(cluster_term(gauge, cfg), x, xr, L);
}

double electron_force_from_fields(const SystemConfig& cfg, double x, double L) {
    // Fixed charges (-e at +-l) push the electron toward the centre.
    const double A = units::coulomb_coupling();
    const double l = cfg.l_nm;
    double force = A * (1.0 / ((l + x) * (l + x)) - 1.0 / ((l - x) * (l - x)));
    // Boosted Coulomb field of the cluster at present-position offset (u, Y):
    // E_x = Q gamma u / (gamma^2 u^2 + Y^2)^(3/2); force = q E_x with q = -e.
    const double gamma = 1.0 / std::sqrt(1.0 - cfg.beta * cfg.beta);
    const double u = x - L;
    const double s = gamma * gamma * u * u + cfg.Y_nm * cfg.Y_nm;
    force -= cfg.cluster_charge_sign * cfg.cluster_count * A * gamma * u / (s * std::sqrt(s));
    return force;
}

std::vector<double> find_equilibria(Gauge gauge, const SystemConfig& cfg, double L) {
    const double edge = cfg.l_nm * (1.0 - 1e-6);
    std::vector<double> minima;
    double x_prev = -edge;
    double g_prev = expansion_coefficients(gauge, cfg, x_prev, L).gradient;
    for (std::size_t i = 1; i < equilibrium_scan_points; ++i) {
        const double x = -edge + 2.0 * edge * static_cast<double>(i) / (equilibrium_scan_points - 1);
        const double g = expansion_coefficients(gauge, cfg, x, L).gradient;
        if (g_prev < 0.0 && g >= 0.0) minima.push_back(refine_root(gauge, cfg, L, x_prev, x));
        x_prev = x;
        g_prev = g;
    }
    return minima;
}

HarmonicParams quadratic_fit_at(Gauge gauge, const SystemConfig& cfg, double L, double guess, double t_ns) {
    const double edge = cfg.l_nm * (1.0 - 1e-9);
    if (!(std::abs(guess) < cfg.l_nm)) {
        std::ostringstream os;
        os << "x0 guess " << guess << " nm outside (-l, l)";
        throw DomainError(os.str());
    }
    double a = -edge;
    double b = edge;
    if (!(expansion_coefficients(gauge, cfg, a, L).gradient < 0.0 &&
          expansion_coefficients(gauge, cfg, b, L).gradient > 0.0))
        throw ConvergenceError("equilibrium not bracketed inside (-l, l)");

    bool nonconvex = false;
    bool converged = false;
    double x = guess;
    for (int it = 0; it < newton_budget; ++it) {
        const auto c = expansion_coefficients(gauge, cfg, x, L);
        if (c.gradient == 0.0) {
            converged = true;
            break;
        }
        if (c.gradient < 0.0)
            a = x;
        else
            b = x;
        double next;
        if (c.curvature > 0.0) {
            next = x - c.gradient / c.curvature;
            if (!(next > a && next < b)) next = 0.5 * (a + b);
        } else {
            nonconvex = true;
            next = 0.5 * (a + b);
        }
        const double step = std::abs(next - x);
        x = next;
        if (step <= newton_tol_nm) {
            converged = true;
            break;
        }
    }
    if (!converged) throw ConvergenceError("equilibrium search exhausted its iteration budget");

    if (nonconvex || !(expansion_coefficients(gauge, cfg, x, L).curvature > 0.0)) {
        const auto minima = find_equilibria(gauge, cfg, L);
        if (minima.empty()) throw ConfinementLostError("no local minimum inside (-l, l)");
        if (minima.size() > 1) {
            std::vector<std::pair<double, double>> by_distance;
            for (double m : minima) by_distance.emplace_back(std::abs(m - guess), m);
            std::sort(by_distance.begin(), by_distance.end());
            if (by_distance[1].first - by_distance[0].first <= 1e-9 * cfg.l_nm) {
                std::ostringstream os;
                os << minima.size() << " equilibria inside (-l, l) equidistant from the guess " << guess << " nm";
                throw MultipleRootsError(os.str());
            }
            x = by_distance[0].second;
        } else {
            x = minima.front();
        }
        // Polish with Newton now that the basin is known to be convex.
        for (int it = 0; it < newton_budget; ++it) {
            const auto c = expansion_coefficients(gauge, cfg, x, L);
            const double step = c.gradient / c.curvature;
            x -= step;
            if (std::abs(step) <= newton_tol_nm) break;
        }
    }
    return make_params(gauge, cfg, x, L, t_ns);
}

HarmonicParams quadratic_fit(Gauge gauge, const SystemConfig& cfg, double t_ns, double guess) {
    const double L = ClusterTrajectory(cfg).position_nm(t_ns);
    return quadratic_fit_at(gauge, cfg, L, guess, t_ns);
}

std::vector<HarmonicParams> trajectory_scan(Gauge gauge, const SystemConfig& cfg, std::span<const double> times) {
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw DomainError("trajectory_scan: time grid not strictly increasing");

    std::vector<HarmonicParams> out;
    out.reserve(times.size());
    double guess = 0.0;
    for (double t : times) {
        try {
            out.push_back(quadratic_fit(gauge, cfg, t, guess));
        } catch (const Error& e) {
            std::ostringstream os;
            os << "trajectory_scan(" << to_string(gauge) << ") at t = " << t << " ns: " << e.what();
            throw ConvergenceError(os.str());
        }
        guess = out.back().x0_nm;
    }
    return out;
}

std::vector<double> TimeGrid::times() const {
    std::vector<double> t;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        const auto& seg = segments[s];
        const std::size_t first = s == 0 ? 0 : 1;
        for (std::size_t i = first; i <= seg.panels; ++i) t.push_back(seg.start_ns + static_cast<double>(i) * seg.step_ns);
    }
    return t;
}

double TimeGrid::end_ns() const {
    if (segments.empty()) return 0.0;
    const auto& s = segments.back();
    return s.start_ns + static_cast<double>(s.panels) * s.step_ns;
}

TimeGrid make_time_grid(const SystemConfig& cfg, const TimeGridSpec& spec, double t_end) {
    const ClusterTrajectory traj(cfg);
    if (t_end <= 0.0) t_end = traj.duration_ns();
    if (!(t_end > 0.0)) throw ConfigError("t_f_ns: required when the transit duration is undefined (beta = 0)");
    if (spec.coarse_intervals < 2 || spec.refine_factor < 1) throw ConfigError("time grid: bad spec");

    // The coarse step is fixed per transit so that shorter or longer
    // integration windows reuse the same knots.
    const double base = traj.duration_ns() > 0.0 ? traj.duration_ns() : t_end;
    const double h = base / static_cast<double>(spec.coarse_intervals);
    const auto n = static_cast<std::size_t>(std::ceil(t_end / h - 1e-9));
    TimeGrid full;

    std::size_t i1 = n, i2 = n;
    if (traj.velocity_nm_per_ns() > 0.0 && spec.refine_factor > 1 && spec.refine_half_width_Y > 0.0) {
        const double w = spec.refine_half_width_Y * cfg.Y_nm / traj.velocity_nm_per_ns();
        const double lo = (traj.t_mid_ns() - w) / h;
        const double hi = (traj.t_mid_ns() + w) / h;
        const double lo_c = std::clamp(std::floor(lo + 1e-9), 0.0, static_cast<double>(n));
        const double hi_c = std::clamp(std::ceil(hi - 1e-9), 0.0, static_cast<double>(n));
        if (hi_c > lo_c) {
            i1 = static_cast<std::size_t>(lo_c);
            i2 = static_cast<std::size_t>(hi_c);
        }
    }
    if (i1 >= i2) {
        full.segments.push_back({0.0, h, n});
    } else {
        if (i1 > 0) full.segments.push_back({0.0, h, i1});
        full.segments.push_back({static_cast<double>(i1) * h, h / static_cast<double>(spec.refine_factor),
                                 (i2 - i1) * spec.refine_factor});
        if (i2 < n) full.segments.push_back({static_cast<double>(i2) * h, h, n - i2});
    }

    // Clip to t_end; the panel straddling t_end becomes a shorter last panel.
    TimeGrid grid;
    for (const auto& s : full.segments) {
        const double whole = std::floor((t_end - s.start_ns) / s.step_ns * (1.0 + 1e-12));
        if (whole >= static_cast<double>(s.panels)) {
            grid.segments.push_back(s);
            continue;
        }
        const auto k = static_cast<std::size_t>(std::max(whole, 0.0));
        if (k > 0) grid.segments.push_back({s.start_ns, s.step_ns, k});
        const double at = s.start_ns + static_cast<double>(k) * s.step_ns;
        if (t_end - at > 1e-9 * s.step_ns) grid.segments.push_back({at, t_end - at, 1});
        break;
    }
    return grid;
}

}  // namespace gaugeline
