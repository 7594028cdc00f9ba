// spline.hpp — natural cubic spline on a strictly increasing, possibly
// nonuniform abscissa, with exact derivative and running integral.

#pragma once

#include <span>
#include <vector>

namespace gaugeline {

class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::span<const double> x, std::span<const double> y);

    double operator()(double x) const;
    double derivative(double x) const;
    // Integral from x.front() to x.
    double integral(double x) const;

    std::span<const double> knots() const { return x_; }
    std::span<const double> values() const { return y_; }
    bool empty() const { return x_.empty(); }

private:
    std::size_t interval(double x) const;

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;    // second derivatives at knots
    std::vector<double> cum_;  // integral up to each knot
};

}  // namespace gaugeline
