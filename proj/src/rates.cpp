#include <cmath>
#include <numbers>

#include "kernel.hpp"
#include "tripletforge/constants.hpp"
#include "tripletforge/errors.hpp"
#include "tripletforge/jsa.hpp"

namespace tripletforge::jsa {

namespace {

using numerics::Interval;
using numerics::pairwise_sum;

double pulsed_integral(const Source& s, const IntegrationSettings& st, int level) {
    const detail::Kernel kr(s);
    const Interval win{s.window.omega_min, s.window.omega_max};
    const Interval sig{std::max(kr.omega0 - detail::kEnvelopeSigmas * kr.sigma_p, s.pump_sum_min()),
                       std::min(kr.omega0 + detail::kEnvelopeSigmas * kr.sigma_p, s.pump_sum_max())};
    const auto a = detail::rule(win, st.smooth_nodes, level, st);
    const auto b = detail::rule(sig, st.sharp_nodes, level, st);

    // Per pump-sum node: weight * xi^2 / n(sum), and k_p.
    std::vector<double> sw(b.size()), skp(b.size());
    for (std::size_t m = 0; m < b.size(); ++m) {
        const double x = kr.xi(b.x[m]);
        sw[m] = b.w[m] * x * x / kr.n(b.x[m]);
        skp[m] = kr.kp(b.x[m]);
    }
    const auto outer = numerics::parallel_map(a.size(), [&](std::size_t i) {
        const double w1 = a.x[i];
        const double k1 = kr.k1(w1);
        std::vector<double> row(a.size()), inner(b.size());
        for (std::size_t j = 0; j < a.size(); ++j) {
            const double w2 = a.x[j];
            const double k12 = k1 + kr.k1(w2);
            for (std::size_t m = 0; m < b.size(); ++m) {
                const double w3 = b.x[m] - w1 - w2;
                if (!kr.in_window(w3)) {
                    inner[m] = 0.0;
                    continue;
                }
                const double xs = detail::sinc(kr.sinc_arg(k12 + kr.k1(w3) - skp[m]));
                inner[m] = sw[m] * xs * xs * w3 / kr.n(w3);
            }
            row[j] = a.w[j] * w2 / kr.n(w2) * pairwise_sum(inner);
        }
        return a.w[i] * w1 / kr.n(w1) * pairwise_sum(row);
    });
    return pairwise_sum(outer);
}

double cw_integral(const Source& s, const IntegrationSettings& st, int level) {
    const detail::Kernel kr(s);
    const Interval win{s.window.omega_min, s.window.omega_max};
    const auto a = detail::rule(win, st.sharp_nodes, level, st);
    const auto outer = numerics::parallel_map(a.size(), [&](std::size_t i) {
        const double w1 = a.x[i];
        // w2 range keeping w3 = w0 - w1 - w2 inside the window.
        const double lo = std::max(kr.wmin, kr.omega0 - w1 - kr.wmax);
        const double hi = std::min(kr.wmax, kr.omega0 - w1 - kr.wmin);
        if (!(hi > lo)) return 0.0;
        const auto b = detail::rule({lo, hi}, st.sharp_nodes, level, st);
        const double k1 = kr.k1(w1) - kr.kp0;
        std::vector<double> inner(b.size());
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double w2 = b.x[j];
            const double w3 = kr.omega0 - w1 - w2;
            const double xs = detail::sinc(kr.sinc_arg(k1 + kr.k1(w2) + kr.k1(w3)));
            inner[j] = b.w[j] * xs * xs * w2 * w3 / (kr.n(w2) * kr.n(w3));
        }
        return a.w[i] * w1 / kr.n(w1) * pairwise_sum(inner);
    });
    return pairwise_sum(outer) / kr.n0;
}

// Unnormalised marginal at w1; pulsed uses (w2, pump sum), cw the plane w3 = w0 - w1 - w2.
double marginal_at(const detail::Kernel& kr, const Source& s, double w1, const IntegrationSettings& st, int level) {
    const double k1 = kr.k1(w1);
    if (!s.pump.pulsed()) {
        const double lo = std::max(kr.wmin, kr.omega0 - w1 - kr.wmax);
        const double hi = std::min(kr.wmax, kr.omega0 - w1 - kr.wmin);
        if (!(hi > lo)) return 0.0;
        const auto b = detail::rule({lo, hi}, st.sharp_nodes, level, st);
        std::vector<double> inner(b.size());
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double xs = detail::sinc(kr.sinc_arg(k1 + kr.k1(b.x[j]) + kr.k1(kr.omega0 - w1 - b.x[j]) - kr.kp0));
            inner[j] = b.w[j] * xs * xs;
        }
        return pairwise_sum(inner);
    }
    const Interval sig{std::max(kr.omega0 - detail::kEnvelopeSigmas * kr.sigma_p, s.pump_sum_min()),
                       std::min(kr.omega0 + detail::kEnvelopeSigmas * kr.sigma_p, s.pump_sum_max())};
    const auto b = detail::rule(sig, st.smooth_nodes, level, st);
    std::vector<double> outer(b.size());
    for (std::size_t m = 0; m < b.size(); ++m) {
        const double sum = b.x[m];
        const double lo = std::max(kr.wmin, sum - w1 - kr.wmax);
        const double hi = std::min(kr.wmax, sum - w1 - kr.wmin);
        if (!(hi > lo)) continue;
        const double kp = kr.kp(sum), x = kr.xi(sum);
        const auto c = detail::rule({lo, hi}, st.sharp_nodes, level, st);
        std::vector<double> inner(c.size());
        for (std::size_t j = 0; j < c.size(); ++j) {
            const double xs = detail::sinc(kr.sinc_arg(k1 + kr.k1(c.x[j]) + kr.k1(sum - w1 - c.x[j]) - kp));
            inner[j] = c.w[j] * xs * xs;
        }
        outer[m] = b.w[m] * x * x * pairwise_sum(inner);
    }
    return pairwise_sum(outer);
}

}  // namespace

Marginal single_photon_marginal(const Source& s, const FrequencyAxis& axis, const IntegrationSettings& st) {
    st.validate();
    if (axis.count < 2 || !(axis.omega_max > axis.omega_min)) throw ValidationError("marginal axis needs >= 2 increasing nodes");
    const detail::Kernel kr(s);
    std::vector<double> last;
    Marginal m;
    m.report = numerics::refine(
        [&](int level) {
            last = numerics::parallel_map(axis.count, [&](std::size_t i) {
                const double w = axis.at(i);
                return kr.in_window(w) ? marginal_at(kr, s, w, st, level) : 0.0;
            });
            return pairwise_sum(last) * axis.step();
        },
        st.rel_tol, st.max_refinements);
    require_converged(m.report, "single-photon marginal");
    // trapezoid normalisation
    double total = pairwise_sum(last) - 0.5 * (last.front() + last.back());
    total *= axis.step();
    if (!(total > 0.0)) throw NumericalError("single-photon marginal vanishes on the requested axis");
    m.density.resize(last.size());
    for (std::size_t i = 0; i < last.size(); ++i) m.density[i] = last[i] / total;
    return m;
}

SpontaneousRate c3_squared_pulsed(const Source& s, const IntegrationSettings& st) {
    if (!s.pump.pulsed()) throw ValidationError("c3_squared_pulsed needs a pulsed pump");
    st.validate();
    using constants::hbar;
    const double pi = std::numbers::pi;
    const double l = s.length(), n0 = s.n0(), g = s.gamma(), w0 = s.pump.omega0;
    SpontaneousRate r;
    r.pump_kind = SpectralKind::Pulsed;
    r.prefactor = 27.0 * std::sqrt(2.0) * hbar * l * l * std::pow(n0, 4) * s.pump.power_w * g * g /
                  (8.0 * std::pow(pi, 2.5) * w0 * w0 * s.pump.sigma * s.pump.rep_rate_hz);
    r.report = numerics::refine([&](int level) { return pulsed_integral(s, st, level); }, st.rel_tol,
                                st.max_refinements);
    require_converged(r.report, "pulsed triplet-rate integral");
    r.integral = r.report.value;
    r.c3sq = r.prefactor * r.integral;
    r.n0_per_s = jsa::n0(r.c3sq, s.pump);
    return r;
}

SpontaneousRate c3_squared_cw(const Source& s, const IntegrationSettings& st) {
    if (s.pump.pulsed()) throw ValidationError("c3_squared_cw needs a monochromatic pump");
    st.validate();
    using constants::hbar;
    const double pi = std::numbers::pi;
    const double l = s.length(), n0 = s.n0(), g = s.gamma(), w0 = s.pump.omega0;
    SpontaneousRate r;
    r.pump_kind = SpectralKind::Monochromatic;
    r.prefactor = 27.0 * hbar * l * l * std::pow(n0, 4) * s.pump.power_w * g * g / (8.0 * pi * pi * w0 * w0);
    r.report =
        numerics::refine([&](int level) { return cw_integral(s, st, level); }, st.rel_tol, st.max_refinements);
    require_converged(r.report, "cw triplet-rate integral");
    r.integral = r.report.value;
    r.c3sq = r.prefactor * r.integral;
    r.n0_per_s = jsa::n0(r.c3sq, s.pump);
    return r;
}

SpontaneousRate spontaneous_rate(const Source& s, const IntegrationSettings& st) {
    return s.pump.pulsed() ? c3_squared_pulsed(s, st) : c3_squared_cw(s, st);
}

double n0(double c3sq, const PumpSpec& pump) {
    if (!(c3sq >= 0.0)) throw ValidationError("|c3|^2 must be >= 0");
    return 3.0 * c3sq * (pump.pulsed() ? pump.rep_rate_hz : 1.0);
}

}  // namespace tripletforge::jsa
