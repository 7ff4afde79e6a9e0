#include <cmath>
#include <numbers>

#include "tripletforge/constants.hpp"
#include "tripletforge/dispersion.hpp"
#include "tripletforge/errors.hpp"

namespace tripletforge::dispersion {

namespace {
double jn(int nu, double x) { return std::cyl_bessel_j(static_cast<double>(nu), x); }
double kn(int nu, double x) { return std::cyl_bessel_k(static_cast<double>(nu), x); }
}  // namespace

double ModeProfile::operator()(double r, double phi) const {
    const double rr = r / radius_m;
    const double c2 = std::cos(2.0 * phi);
    if (rr < 1.0) return -(a1 * jn(0, u * rr) + a2 * jn(2, u * rr) * c2) / jn(1, u);
    return -(u / w) * (a1 * kn(0, w * rr) - a2 * kn(2, w * rr) * c2) / kn(1, w);
}

ModeProfile mode_profile(const FiberSpec& fiber, const ModeLabel& label, double omega) {
    if (label.nu != 1) throw ValidationError("transverse profiles are implemented for HE1m modes only");
    ModeProfile p;
    p.radius_m = fiber.radius_m;
    p.n_eff = solve_neff(fiber, label, omega);
    const double n1 = fiber.core.n_at_omega(omega);
    const double k0a = omega / constants::c * fiber.radius_m;
    p.u = k0a * std::sqrt(n1 * n1 - p.n_eff * p.n_eff);
    p.w = k0a * std::sqrt(p.n_eff * p.n_eff - fiber.cladding_n * fiber.cladding_n);
    const double v2 = p.u * p.u + p.w * p.w;
    const double j1 = jn(1, p.u), k1 = kn(1, p.w);
    const double b1 = (jn(0, p.u) / j1 - jn(2, p.u) / j1) / (2.0 * p.u);
    const double b2 = -(kn(0, p.w) / k1 + kn(2, p.w) / k1) / (2.0 * p.w);
    const double f2 = v2 / (p.u * p.u * p.w * p.w) / (b1 + b2);
    p.a1 = 0.5 * (f2 - 1.0);
    p.a2 = 0.5 * (f2 + 1.0);
    return p;
}

double four_field_overlap(const std::array<Profile, 4>& u, const OverlapQuadrature& q) {
    if (q.radial_breaks.size() < 2 || q.radial_breaks.front() != 0.0)
        throw ValidationError("overlap quadrature needs radial breaks starting at 0");
    std::vector<double> rs, ws;
    for (std::size_t s = 0; s + 1 < q.radial_breaks.size(); ++s) {
        const auto set = numerics::composite_rule({q.radial_breaks[s], q.radial_breaks[s + 1]},
                                                  8 * q.panels_per_segment, numerics::Rule::GaussLegendre);
        rs.insert(rs.end(), set.x.begin(), set.x.end());
        ws.insert(ws.end(), set.w.begin(), set.w.end());
    }
    const std::size_t nphi = q.azimuthal_points;
    const double dphi = 2.0 * std::numbers::pi / static_cast<double>(nphi);
    std::array<std::vector<double>, 4> sq;
    std::vector<double> prod;
    for (auto& v : sq) v.reserve(rs.size() * nphi);
    prod.reserve(rs.size() * nphi);
    for (std::size_t i = 0; i < rs.size(); ++i) {
        for (std::size_t j = 0; j < nphi; ++j) {
            const double phi = dphi * static_cast<double>(j);
            const double wt = ws[i] * rs[i] * dphi;
            double vals[4];
            for (int k = 0; k < 4; ++k) vals[k] = u[k](rs[i], phi);
            for (int k = 0; k < 4; ++k) sq[k].push_back(wt * vals[k] * vals[k]);
            prod.push_back(wt * vals[0] * vals[1] * vals[2] * vals[3]);
        }
    }
    double norm = 1.0;
    for (auto& v : sq) {
        const double n2 = numerics::pairwise_sum(v);
        if (!(n2 > 0.0) || !std::isfinite(n2)) throw NumericalError("transverse profile is not normalizable");
        norm *= std::sqrt(n2);
    }
    return numerics::pairwise_sum(prod) / norm;
}

double nonlinear_coefficient(double chi3, double omega0, double f_eff, double n0) {
    return 3.0 * chi3 * omega0 * f_eff / (4.0 * constants::eps0 * constants::c * constants::c * n0 * n0);
}

OverlapResult effective_overlap(const FiberSpec& fiber, const ModeLabel& pump_mode, const ModeLabel& triplet_mode,
                                double omega0, double chi3, int resolution) {
    fiber.validate();
    if (!(chi3 > 0.0)) throw ValidationError("chi3 must be > 0");
    if (resolution < 1) throw ValidationError("overlap resolution must be >= 1");
    const ModeProfile p = mode_profile(fiber, pump_mode, omega0);
    const ModeProfile t = mode_profile(fiber, triplet_mode, omega0 / 3.0);
    const double a = fiber.radius_m;
    const double wmin = std::min(p.w, t.w);
    OverlapQuadrature q;
    q.radial_breaks = {0.0, 0.5 * a, a, a * (1.0 + 2.0 / wmin), a * (1.0 + 8.0 / wmin), a * (1.0 + 24.0 / wmin),
                       a * (1.0 + 48.0 / wmin)};
    q.panels_per_segment = 4 * static_cast<std::size_t>(resolution);
    q.azimuthal_points = 32;
    Profile up = [&](double r, double phi) { return p(r, phi); };
    Profile ut = [&](double r, double phi) { return t(r, phi); };
    OverlapResult out;
    out.f_eff = std::abs(four_field_overlap({up, ut, ut, ut}, q));
    out.a_eff_triplet = 1.0 / four_field_overlap({ut, ut, ut, ut}, q);
    out.chi3 = chi3;
    out.n0 = fiber.core.n_at_omega(omega0);
    out.gamma = nonlinear_coefficient(chi3, omega0, out.f_eff, out.n0);
    if (!(out.f_eff > 0.0)) throw NumericalError("four-field overlap vanished");
    return out;
}

double phase_matched_radius(const FiberSpec& fiber, const ModeLabel& pump_mode, const ModeLabel& triplet_mode,
                            double omega0, double radius_lo, double radius_hi) {
    auto mismatch = [&](double radius) {
        FiberSpec f = fiber;
        f.radius_m = radius;
        // Delta k at the degenerate point is (omega0/c) (n_triplet - n_pump).
        return solve_neff(f, triplet_mode, omega0 / 3.0) - solve_neff(f, pump_mode, omega0);
    };
    try {
        return numerics::find_root_bracketed(mismatch, radius_lo, radius_hi, 1e-13);
    } catch (const NumericalError&) {
        throw ValidationError("no phase-matched radius in [" + std::to_string(radius_lo * 1e6) + ", " +
                              std::to_string(radius_hi * 1e6) + "] um");
    }
}

}  // namespace tripletforge::dispersion
