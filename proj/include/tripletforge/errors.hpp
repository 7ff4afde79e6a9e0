#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tripletforge {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input or inconsistent configuration.
struct ValidationError : Error {
    using Error::Error;
};

// Argument outside the domain of a model (wavelength window, curve span).
struct DomainError : ValidationError {
    using ValidationError::ValidationError;
};

struct BelowCutoffError : DomainError {
    BelowCutoffError(const std::string& what, std::vector<double> omegas)
        : DomainError(what), omega_rad_s(std::move(omegas)) {}
    std::vector<double> omega_rad_s;
};

struct WindowError : ValidationError {
    WindowError(const std::string& what, double lo, double hi)
        : ValidationError(what), suggested_omega_min(lo), suggested_omega_max(hi) {}
    double suggested_omega_min;
    double suggested_omega_max;
};

struct NumericalError : Error {
    using Error::Error;
};

struct ConvergenceError : NumericalError {
    ConvergenceError(const std::string& what, double est, double err)
        : NumericalError(what), estimate(est), rel_error(err) {}
    double estimate;
    double rel_error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace tripletforge
