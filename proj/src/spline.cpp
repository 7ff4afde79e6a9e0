#include "tripletforge/spline.hpp"

#include <algorithm>
#include <cmath>

#include "tripletforge/errors.hpp"

namespace tripletforge::numerics {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 4 || y_.size() != n) throw ValidationError("cubic spline needs >= 4 matching samples");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw ValidationError("spline abscissae must be strictly increasing");

    // Tridiagonal solve for second derivatives, natural end conditions.
    m_.assign(n, 0.0);
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
        const double a = hl / 6.0, b = (hl + hr) / 3.0, cc = hr / 6.0;
        const double rhs = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
        const double denom = b - a * c[i - 1];
        c[i] = cc / denom;
        d[i] = (rhs - a * d[i - 1]) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        m_[i] = d[i] - c[i] * m_[i + 1];
        if (i == 1) break;
    }

    h_ = (x_.back() - x_.front()) / static_cast<double>(n - 1);
    uniform_ = true;
    for (std::size_t i = 1; i < n && uniform_; ++i)
        if (std::abs((x_[i] - x_[i - 1]) - h_) > 1e-9 * h_) uniform_ = false;
}

std::size_t CubicSpline::interval(double x) const {
    const std::size_t n = x_.size();
    std::size_t i;
    if (uniform_) {
        const double t = (x - x_.front()) / h_;
        i = t <= 0.0 ? 0 : static_cast<std::size_t>(t);
        if (i > n - 2) i = n - 2;
        // Guard against rounding at node boundaries.
        if (x < x_[i] && i > 0) --i;
        else if (x > x_[i + 1] && i + 2 < n) ++i;
    } else {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        if (i > n - 2) i = n - 2;
    }
    return i;
}

double CubicSpline::operator()(double x) const {
    const std::size_t i = interval(x);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double x) const {
    const std::size_t i = interval(x);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * m_[i] + (3.0 * b * b - 1.0) / 6.0 * h * m_[i + 1];
}

}  // namespace tripletforge::numerics
