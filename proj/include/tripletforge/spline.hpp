#pragma once

#include <cstddef>
#include <vector>

namespace tripletforge::numerics {

// Natural cubic spline. Uniformly spaced abscissae use O(1) interval lookup.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    double derivative(double x) const;
    double lo() const { return x_.front(); }
    double hi() const { return x_.back(); }
    bool contains(double x) const { return x >= x_.front() && x <= x_.back(); }
    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }

private:
    std::size_t interval(double x) const;

    std::vector<double> x_, y_, m_;
    bool uniform_ = false;
    double h_ = 0.0;
};

}  // namespace tripletforge::numerics
