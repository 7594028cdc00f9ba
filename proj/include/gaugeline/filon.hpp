// filon.hpp — Filon-type quadrature for  ∫ f(t) exp(i nu t) dt  on a grid of
// uniform-step segments. On every panel the slowly varying f is replaced by
// its interpolating polynomial through Gauss-Legendre nodes and the product
// with the exponential is integrated exactly, so the panel size is set by f
// alone and not by nu.

#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace gaugeline::filon {

inline constexpr int nodes = 4;

using cplx = std::complex<double>;

// Gauss-Legendre nodes mapped to [0, 1].
const std::array<double, nodes>& unit_nodes();

// W_j(theta) = ∫_0^1 l_j(s) exp(i theta s) ds for the Lagrange basis l_j on
// the unit nodes.
std::array<cplx, nodes> weights(double theta);

struct Segment {
    double start;
    double step;
    std::size_t panels;
};

// f sampled at the Filon nodes of every panel, panel-major.
class PanelSet {
public:
    PanelSet() = default;
    PanelSet(std::vector<Segment> segments, const std::function<cplx(double)>& f);

    // ∫ f(t) exp(i nu t) dt over all panels.
    cplx integrate(double nu) const;

    // Same integrand with every panel split in two.
    PanelSet halved(const std::function<cplx(double)>& f) const;

    std::span<const Segment> segments() const { return segments_; }
    std::size_t panel_count() const;

private:
    std::vector<Segment> segments_;
    std::vector<cplx> values_;
};

// Clip a segment list to [start of first, t_end], splitting the panel that
// straddles t_end into a shorter trailing panel.
std::vector<Segment> clip_segments(std::span<const Segment> segments, double t_end);

}  // namespace gaugeline::filon
