#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tripletforge/constants.hpp"
#include "tripletforge/dispersion.hpp"
#include "tripletforge/errors.hpp"

namespace tripletforge::dispersion {

namespace {

struct Normalized {
    double u, w, r;
};

double jn(int nu, double x) { return std::cyl_bessel_j(static_cast<double>(nu), x); }

double kn(int nu, double x) { return std::cyl_bessel_k(static_cast<double>(std::abs(nu)), x); }

double jprime(int nu, double x) { return 0.5 * (jn(nu - 1, x) - jn(nu + 1, x)); }

double kprime(int nu, double x) { return -0.5 * (kn(nu - 1, x) + kn(nu + 1, x)); }

// HE-branch right-hand side of J'(u)/(u J(u)) = rhs(w).
double he_rhs(int nu, double u, double w, double r) {
    const double kp = kprime(nu, w) / (w * kn(nu, w));
    const double rr = nu * nu * (1.0 / (u * u) + 1.0 / (w * w)) * (1.0 / (u * u) + r / (w * w));
    const double t = 0.5 * (1.0 - r) * kp;
    return -0.5 * (1.0 + r) * kp - std::sqrt(t * t + rr);
}

// Pole-free form J'(u)/u - J(u) rhs(w).
double he_function(int nu, double u, double v, double r) {
    const double w = std::sqrt(std::max(v * v - u * u, 0.0));
    return jprime(nu, u) / u - jn(nu, u) * he_rhs(nu, u, w, r);
}

struct Setup {
    double v, r, n1, k0, a;
};

Setup setup(const FiberSpec& fiber, double omega) {
    Setup s;
    s.n1 = fiber.core.n_at_omega(omega);
    s.k0 = omega / constants::c;
    s.a = fiber.radius_m;
    s.v = s.a * s.k0 * std::sqrt(s.n1 * s.n1 - fiber.cladding_n * fiber.cladding_n);
    s.r = fiber.cladding_n * fiber.cladding_n / (s.n1 * s.n1);
    return s;
}

constexpr int kScanSamples = 256;

// Brackets of successive roots in ascending u.
std::vector<std::pair<double, double>> he_brackets(int nu, const Setup& s, int samples, std::size_t wanted) {
    std::vector<std::pair<double, double>> out;
    const double v = s.v;
    double prev_u = v * 1e-6;
    double prev_f = he_function(nu, prev_u, v, s.r);
    for (int i = 1; i <= samples && out.size() < wanted; ++i) {
        const double u = (i == samples) ? v * (1.0 - 1e-9) : v * static_cast<double>(i) / samples;
        const double f = he_function(nu, u, v, s.r);
        if (std::isfinite(f) && std::isfinite(prev_f) && (f > 0) != (prev_f > 0)) out.emplace_back(prev_u, u);
        prev_u = u;
        prev_f = f;
    }
    return out;
}

}  // namespace

int count_he_roots(const FiberSpec& fiber, int nu, double omega, int samples) {
    const Setup s = setup(fiber, omega);
    return static_cast<int>(he_brackets(nu, s, samples, std::numeric_limits<std::size_t>::max()).size());
}

double solve_neff(const FiberSpec& fiber, const ModeLabel& label, double omega) {
    if (label.family != "HE") throw ValidationError("only HE modes are supported, got " + label.str());
    if (!(omega > 0.0)) throw DomainError("mode solve needs omega > 0");
    const Setup s = setup(fiber, omega);
    const auto br = he_brackets(label.nu, s, kScanSamples, static_cast<std::size_t>(label.m));
    if (br.size() < static_cast<std::size_t>(label.m)) {
        std::ostringstream os;
        os << label.str() << " is below cutoff at omega = " << omega << " rad/s (V = " << s.v << ")";
        throw BelowCutoffError(os.str(), {omega});
    }
    const auto [lo, hi] = br[static_cast<std::size_t>(label.m - 1)];
    const double u = numerics::find_root_bracketed(
        [&](double x) { return he_function(label.nu, x, s.v, s.r); }, lo, hi, 1e-15);
    const double beta_over_k0_sq = s.n1 * s.n1 - (u / (s.a * s.k0)) * (u / (s.a * s.k0));
    return std::sqrt(beta_over_k0_sq);
}

double characteristic_residual(const FiberSpec& fiber, const ModeLabel& label, double omega, double n_eff) {
    const Setup s = setup(fiber, omega);
    const int nu = label.nu;
    const double u = s.a * s.k0 * std::sqrt(s.n1 * s.n1 - n_eff * n_eff);
    const double w = s.a * s.k0 * std::sqrt(n_eff * n_eff - fiber.cladding_n * fiber.cladding_n);
    const double jp = jprime(nu, u) / (u * jn(nu, u));
    const double kp = kprime(nu, w) / (w * kn(nu, w));
    const double rr = nu * nu * (1.0 / (u * u) + 1.0 / (w * w)) * (1.0 / (u * u) + s.r / (w * w));
    const double d = (jp + kp) * (jp + s.r * kp) - rr;
    const double scale = std::abs(jp + kp) * std::abs(jp + s.r * kp) + std::abs(rr);
    return std::abs(d) / scale;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
    if (n < 2 || !(hi > lo)) throw ValidationError("uniform grid needs n >= 2 and hi > lo");
    std::vector<double> g(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + h * static_cast<double>(i);
    g.back() = hi;
    return g;
}

ModeCurve solve_mode(const FiberSpec& fiber, const ModeLabel& label, const std::vector<double>& omega_grid) {
    fiber.validate();
    if (omega_grid.size() < 4) throw ValidationError("mode solve needs at least 4 grid points");
    for (std::size_t i = 1; i < omega_grid.size(); ++i)
        if (!(omega_grid[i] > omega_grid[i - 1])) throw ValidationError("omega grid must be strictly increasing");
    const std::size_t n = omega_grid.size();
    std::vector<double> neff(n);
    std::vector<char> below(n, 0);
    numerics::parallel_for(n, [&](std::size_t i) {
        try {
            neff[i] = solve_neff(fiber, label, omega_grid[i]);
        } catch (const BelowCutoffError&) {
            below[i] = 1;
        }
    });
    std::vector<double> bad;
    for (std::size_t i = 0; i < n; ++i)
        if (below[i]) bad.push_back(omega_grid[i]);
    if (!bad.empty()) {
        std::ostringstream os;
        os << label.str() << " is below cutoff at " << bad.size() << " grid frequencies, from "
           << bad.front() << " to " << bad.back() << " rad/s (wavelength " << constants::lambda_from_omega(bad.back()) * 1e9
           << " nm to " << constants::lambda_from_omega(bad.front()) * 1e9 << " nm)";
        throw BelowCutoffError(os.str(), bad);
    }
    return ModeCurve(label, omega_grid, std::move(neff), Provenance::Solved);
}

ModeCurve::ModeCurve(ModeLabel label, std::vector<double> omega, std::vector<double> n_eff, Provenance prov)
    : label_(std::move(label)), omega_(std::move(omega)), n_eff_(std::move(n_eff)), provenance_(prov) {
    if (omega_.size() != n_eff_.size() || omega_.size() < 4)
        throw ValidationError("mode curve needs >= 4 matching omega/n_eff samples");
    for (std::size_t i = 0; i < omega_.size(); ++i) {
        if (!(omega_[i] > 0.0) || !std::isfinite(n_eff_[i]) || !(n_eff_[i] >= 1.0))
            throw ValidationError("mode curve " + label_.str() + ": invalid sample at index " + std::to_string(i));
        if (i > 0) {
            if (!(omega_[i] > omega_[i - 1]))
                throw ValidationError("mode curve " + label_.str() + ": omega must be strictly increasing");
            if (!(n_eff_[i] * omega_[i] > n_eff_[i - 1] * omega_[i - 1]))
                throw ValidationError("mode curve " + label_.str() + ": k(omega) must be strictly increasing");
        }
    }
    spline_ = numerics::CubicSpline(omega_, n_eff_);
}

void ModeCurve::require(double w) const {
    if (!contains(w)) {
        std::ostringstream os;
        os << "omega " << w << " rad/s outside the span [" << omega_.front() << ", " << omega_.back()
           << "] of mode curve " << label_.str();
        throw DomainError(os.str());
    }
}

double ModeCurve::k_unchecked(double w) const { return spline_(w) * w / constants::c; }

double ModeCurve::dk_domega_unchecked(double w) const { return (spline_(w) + w * spline_.derivative(w)) / constants::c; }

double ModeCurve::n_eff(double w) const {
    require(w);
    return spline_(w);
}

double ModeCurve::k(double w) const {
    require(w);
    return k_unchecked(w);
}

double ModeCurve::dk_domega(double w) const {
    require(w);
    return dk_domega_unchecked(w);
}

double group_velocity(const ModeCurve& curve, double omega) {
    const double d = curve.dk_domega(omega);
    if (!(d > 0.0)) throw NumericalError("non-positive dk/domega on curve " + curve.label().str());
    return 1.0 / d;
}

}  // namespace tripletforge::dispersion
