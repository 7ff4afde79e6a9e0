#pragma once

#include <cmath>

#include "tripletforge/jsa.hpp"
#include "tripletforge/numerics.hpp"

namespace tripletforge::detail {

inline constexpr double kEnvelopeSigmas = 6.0;

// Unchecked evaluators over a source; callers keep frequencies inside spans.
struct Kernel {
    const dispersion::ModeCurve* tc;
    const dispersion::ModeCurve* pc;
    const dispersion::MaterialIndex* material;
    double half_l;
    double omega0;
    double sigma_p;
    double wmin, wmax;
    double kp0;
    double n0;

    explicit Kernel(const jsa::Source& s)
        : tc(s.triplet_curve.get()),
          pc(s.pump_curve.get()),
          material(&s.fiber.core),
          half_l(0.5 * s.fiber.length_m),
          omega0(s.pump.omega0),
          sigma_p(s.pump.sigma),
          wmin(s.window.omega_min),
          wmax(s.window.omega_max),
          kp0(s.pump_curve->k(s.pump.omega0)),
          n0(s.n0()) {}

    bool in_window(double w) const { return w >= wmin && w <= wmax; }
    bool in_pump_support(double sum) const {
        return std::abs(sum - omega0) <= kEnvelopeSigmas * sigma_p && pc->contains(sum);
    }
    double k1(double w) const { return tc->k_unchecked(w); }
    double kp(double w) const { return pc->k_unchecked(w); }
    double n(double w) const { return material->n_at_omega(w); }
    double xi(double sum) const {
        const double d = (sum - omega0) / sigma_p;
        return std::exp(-d * d);
    }
    double sinc_arg(double dk) const { return half_l * dk; }
};

inline double sinc(double x) {
    if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

inline numerics::NodeSet rule(numerics::Interval iv, std::size_t base, int level, const jsa::IntegrationSettings& s) {
    std::size_t n = base;
    for (int i = 0; i < level; ++i) n *= 2;
    return numerics::composite_rule(iv, n, s.rule);
}

}  // namespace tripletforge::detail
