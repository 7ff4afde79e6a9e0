#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tripletforge/numerics.hpp"
#include "tripletforge/spline.hpp"

namespace tripletforge::dispersion {

// Three-term Sellmeier law n^2 = 1 + sum B_i l^2 / (l^2 - C_i^2), l in micrometres,
// or a constant index ("constant", single coefficient).
struct MaterialIndex {
    std::string name = "fused-silica-malitson";
    std::string law = "sellmeier";
    std::vector<double> coefficients{0.6961663, 0.4079426, 0.8974794, 0.0684043, 0.1162414, 9.896161};
    double lambda_min_m = 0.21e-6;
    double lambda_max_m = 6.7e-6;

    static MaterialIndex fused_silica();
    static MaterialIndex constant(double n, double lambda_min_m = 0.1e-6, double lambda_max_m = 10e-6);

    void validate() const;
    double n_at_lambda(double lambda_m) const;
    double n_at_omega(double omega) const;
};

double material_index(const MaterialIndex& law, double lambda_m);

struct FiberSpec {
    double radius_m = 0.395e-6;
    MaterialIndex core = MaterialIndex::fused_silica();
    double cladding_n = 1.0;
    double length_m = 0.01;

    void validate() const;
};

struct ModeLabel {
    std::string family = "HE";
    int nu = 1;
    int m = 1;

    std::string str() const;
    static ModeLabel parse(const std::string& s);
    bool operator==(const ModeLabel&) const = default;
};

enum class Provenance { Solved, UserTabulated };

class ModeCurve {
public:
    ModeCurve() = default;
    ModeCurve(ModeLabel label, std::vector<double> omega, std::vector<double> n_eff, Provenance prov);

    const ModeLabel& label() const { return label_; }
    Provenance provenance() const { return provenance_; }
    const std::vector<double>& omega() const { return omega_; }
    const std::vector<double>& n_eff_samples() const { return n_eff_; }
    double omega_min() const { return omega_.front(); }
    double omega_max() const { return omega_.back(); }
    bool contains(double w) const { return w >= omega_.front() && w <= omega_.back(); }

    // Unchecked evaluators for hot loops; callers ensure contains(w).
    double n_eff_unchecked(double w) const { return spline_(w); }
    double k_unchecked(double w) const;
    double dk_domega_unchecked(double w) const;

    double n_eff(double w) const;
    double k(double w) const;
    double dk_domega(double w) const;

private:
    void require(double w) const;

    ModeLabel label_;
    std::vector<double> omega_, n_eff_;
    Provenance provenance_ = Provenance::Solved;
    numerics::CubicSpline spline_;
};

double group_velocity(const ModeCurve& curve, double omega);

// Exact step-index vector mode solver, HE family only.
double solve_neff(const FiberSpec& fiber, const ModeLabel& label, double omega);
ModeCurve solve_mode(const FiberSpec& fiber, const ModeLabel& label, const std::vector<double>& omega_grid);

// |D| / scale of the full characteristic equation (J+K)(J+rK) - R at n_eff.
double characteristic_residual(const FiberSpec& fiber, const ModeLabel& label, double omega, double n_eff);

// Sign-change count of the HE characteristic function on a uniform u scan.
int count_he_roots(const FiberSpec& fiber, int nu, double omega, int samples);

std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

// Transverse x-polarised field of an HE_1m mode, unnormalised.
struct ModeProfile {
    double radius_m = 0.0;
    double u = 0.0, w = 0.0;
    double a1 = 0.0, a2 = 0.0;
    double n_eff = 0.0;

    double operator()(double r, double phi) const;
};

ModeProfile mode_profile(const FiberSpec& fiber, const ModeLabel& label, double omega);

using Profile = std::function<double(double r, double phi)>;

struct OverlapQuadrature {
    std::vector<double> radial_breaks;  // increasing, first is 0
    std::size_t panels_per_segment = 8;
    std::size_t azimuthal_points = 64;
};

// Integral of u_a u_b u_c u_d over the plane with each profile normalised to
// unit integral of its square. Units 1/m^2.
double four_field_overlap(const std::array<Profile, 4>& u, const OverlapQuadrature& q);

struct OverlapResult {
    double f_eff = 0.0;   // 1/m^2
    double gamma = 0.0;   // 1/(W m)
    double chi3 = 0.0;    // m^2/V^2
    double n0 = 0.0;
    double a_eff_triplet = 0.0;  // m^2
};

double nonlinear_coefficient(double chi3, double omega0, double f_eff, double n0);

OverlapResult effective_overlap(const FiberSpec& fiber, const ModeLabel& pump_mode, const ModeLabel& triplet_mode,
                                double omega0, double chi3, int resolution = 1);

// Radius in [lo, hi] for which the degenerate point omega0/3 is phase matched.
double phase_matched_radius(const FiberSpec& fiber, const ModeLabel& pump_mode, const ModeLabel& triplet_mode,
                            double omega0, double radius_lo, double radius_hi);

}  // namespace tripletforge::dispersion
