#pragma once

#include <numbers>

namespace tripletforge::constants {

inline constexpr double c = 299792458.0;
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double eps0 = 8.8541878128e-12;
inline constexpr double pi = std::numbers::pi;

inline constexpr double omega_from_lambda(double lambda_m) { return 2.0 * pi * c / lambda_m; }
inline constexpr double lambda_from_omega(double omega) { return 2.0 * pi * c / omega; }

}  // namespace tripletforge::constants
