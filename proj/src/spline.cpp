#include "gaugeline/spline.hpp"

#include <algorithm>
#include <stdexcept>

namespace gaugeline {

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("CubicSpline: need >= 2 matching points");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("CubicSpline: abscissa not strictly increasing");

    m_.assign(n, 0.0);
    if (n > 2) {
        // Thomas algorithm for the natural-spline tridiagonal system.
        std::vector<double> c(n, 0.0), d(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = x_[i] - x_[i - 1];
            const double h1 = x_[i + 1] - x_[i];
            const double a = h0 / 6.0;
            const double b = (h0 + h1) / 3.0;
            const double cc = h1 / 6.0;
            const double rhs = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
            const double denom = b - a * c[i - 1];
            c[i] = cc / denom;
            d[i] = (rhs - a * d[i - 1]) / denom;
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m_[i] = d[i] - c[i] * m_[i + 1];
        }
    }

    cum_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = x_[i + 1] - x_[i];
        cum_[i + 1] = cum_[i] + 0.5 * h * (y_[i] + y_[i + 1]) - h * h * h * (m_[i] + m_[i + 1]) / 24.0;
    }
}

std::size_t CubicSpline::interval(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
}

double CubicSpline::operator()(double x) const {
    const std::size_t i = interval(x);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h;
    const double b = (x - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double x) const {
    const std::size_t i = interval(x);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h;
    const double b = (x - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h + ((1.0 - 3.0 * a * a) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
}

double CubicSpline::integral(double x) const {
    const std::size_t i = interval(x);
    const double h = x_[i + 1] - x_[i];
    const double s = x - x_[i];
    // Integral of the cubic on [x_i, x_i + s].
    const double b = s / h;
    const double lin = y_[i] * (s - 0.5 * s * b) + y_[i + 1] * 0.5 * s * b;
    const double a_end = 1.0 - b;
    // Antiderivative pieces of (a^3 - a) and (b^3 - b) in s, times h^2/6.
    const double ia = -h * (0.25 * (a_end * a_end * a_end * a_end - 1.0) - 0.5 * (a_end * a_end - 1.0));
    const double ib = h * (0.25 * b * b * b * b - 0.5 * b * b);
    return cum_[i] + lin + (ia * m_[i] + ib * m_[i + 1]) * h * h / 6.0;
}

}  // namespace gaugeline
