#include "gaugeline/filon.hpp"

#include <cmath>
#include <stdexcept>

namespace gaugeline::filon {

namespace {

// Monomial coefficients of the Lagrange basis: l_j(s) = sum_k c[j][k] s^k.
struct LagrangeTable {
    std::array<double, nodes> x{};
    std::array<std::array<double, nodes>, nodes> c{};

    LagrangeTable() {
        // 4-point Gauss-Legendre on [-1, 1].
        const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
        const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
        const std::array<double, nodes> gl{-b, -a, a, b};
        for (int j = 0; j < nodes; ++j) x[j] = 0.5 * (gl[j] + 1.0);

        for (int j = 0; j < nodes; ++j) {
            std::array<double, nodes> poly{};
            poly[0] = 1.0;
            int degree = 0;
            double denom = 1.0;
            for (int m = 0; m < nodes; ++m) {
                if (m == j) continue;
                // poly *= (s - x_m)
                for (int k = degree + 1; k >= 1; --k) poly[k] = poly[k - 1] - x[m] * poly[k];
                poly[0] = -x[m] * poly[0];
                ++degree;
                denom *= x[j] - x[m];
            }
            for (int k = 0; k < nodes; ++k) c[j][k] = poly[k] / denom;
        }
    }
};

const LagrangeTable& table() {
    static const LagrangeTable t;
    return t;
}

// m_k(theta) = ∫_0^1 s^k exp(i theta s) ds, k < nodes.
std::array<cplx, nodes> moments(double theta) {
    std::array<cplx, nodes> m{};
    if (std::abs(theta) <= 2.0) {
        // sum_n (i theta)^n / (n! (n + k + 1))
        for (int k = 0; k < nodes; ++k) {
            cplx term(1.0, 0.0);
            cplx sum(0.0, 0.0);
            for (int n = 0; n < 40; ++n) {
                sum += term / static_cast<double>(n + k + 1);
                term *= cplx(0.0, theta) / static_cast<double>(n + 1);
                if (std::abs(term) < 1e-18) break;
            }
            m[k] = sum;
        }
        return m;
    }
    const cplx e = std::polar(1.0, theta);
    const cplx inv = 1.0 / cplx(0.0, theta);
    m[0] = (e - 1.0) * inv;
    for (int k = 1; k < nodes; ++k) m[k] = (e - static_cast<double>(k) * m[k - 1]) * inv;
    return m;
}

constexpr std::size_t resync_every = 64;

}  // namespace

const std::array<double, nodes>& unit_nodes() { return table().x; }

std::array<cplx, nodes> weights(double theta) {
    const auto m = moments(theta);
    const auto& t = table();
    std::array<cplx, nodes> w{};
    for (int j = 0; j < nodes; ++j) {
        cplx s(0.0, 0.0);
        for (int k = 0; k < nodes; ++k) s += t.c[j][k] * m[k];
        w[j] = s;
    }
    return w;
}

PanelSet::PanelSet(std::vector<Segment> segments, const std::function<cplx(double)>& f)
    : segments_(std::move(segments)) {
    const auto& x = unit_nodes();
    values_.reserve(panel_count() * nodes);
    for (const auto& seg : segments_) {
        for (std::size_t i = 0; i < seg.panels; ++i) {
            const double a = seg.start + static_cast<double>(i) * seg.step;
            for (int j = 0; j < nodes; ++j) values_.push_back(f(a + x[j] * seg.step));
        }
    }
}

std::size_t PanelSet::panel_count() const {
    std::size_t n = 0;
    for (const auto& s : segments_) n += s.panels;
    return n;
}

PanelSet PanelSet::halved(const std::function<cplx(double)>& f) const {
    std::vector<Segment> finer;
    for (const auto& s : segments_) finer.push_back({s.start, 0.5 * s.step, 2 * s.panels});
    return PanelSet(std::move(finer), f);
}

cplx PanelSet::integrate(double nu) const {
    cplx total(0.0, 0.0);
    const cplx* v = values_.data();
    for (const auto& seg : segments_) {
        const auto w = weights(nu * seg.step);
        const cplx rot = std::polar(1.0, nu * seg.step);
        cplx z;
        cplx acc(0.0, 0.0);
        for (std::size_t i = 0; i < seg.panels; ++i, v += nodes) {
            if (i % resync_every == 0) z = std::polar(1.0, nu * (seg.start + static_cast<double>(i) * seg.step));
            cplx panel = w[0] * v[0];
            for (int j = 1; j < nodes; ++j) panel += w[j] * v[j];
            acc += z * panel;
            z *= rot;
        }
        total += acc * seg.step;
    }
    return total;
}

std::vector<Segment> clip_segments(std::span<const Segment> segments, double t_end) {
    std::vector<Segment> out;
    for (const auto& s : segments) {
        if (t_end <= s.start) break;
        const double span = t_end - s.start;
        const double whole = std::floor(span / s.step * (1.0 + 1e-12));
        if (whole >= static_cast<double>(s.panels)) {
            out.push_back(s);
            continue;
        }
        const auto n = static_cast<std::size_t>(whole);
        if (n > 0) out.push_back({s.start, s.step, n});
        const double rest = t_end - (s.start + static_cast<double>(n) * s.step);
        if (rest > 1e-12 * s.step) out.push_back({s.start + static_cast<double>(n) * s.step, rest, 1});
        break;
    }
    return out;
}

}  // namespace gaugeline::filon
