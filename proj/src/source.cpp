#include <algorithm>
#include <cmath>
#include <sstream>

#include "kernel.hpp"
#include "tripletforge/constants.hpp"
#include "tripletforge/errors.hpp"
#include "tripletforge/jsa.hpp"

namespace tripletforge {

std::string to_string(SpectralKind k) { return k == SpectralKind::Pulsed ? "pulsed" : "cw"; }

SpectralKind spectral_kind_from_string(const std::string& s) {
    if (s == "pulsed") return SpectralKind::Pulsed;
    if (s == "cw" || s == "monochromatic") return SpectralKind::Monochromatic;
    throw ValidationError("unknown spectral kind '" + s + "' (expected pulsed or cw)");
}

}  // namespace tripletforge

namespace tripletforge::jsa {

void PumpSpec::validate() const {
    if (!(omega0 > 0.0)) throw ValidationError("pump central frequency must be > 0");
    if (!(power_w >= 0.0)) throw ValidationError("pump power must be >= 0");
    if (kind == SpectralKind::Pulsed) {
        if (!(sigma > 0.0)) throw ValidationError("pulsed pump needs bandwidth sigma > 0");
        if (!(rep_rate_hz > 0.0)) throw ValidationError("pulsed pump needs a repetition rate > 0");
    }
}

void IntegrationSettings::validate() const {
    if (!(rel_tol > 0.0)) throw ValidationError("integration tolerance must be > 0");
    if (max_refinements < 1) throw ValidationError("max refinements must be >= 1");
    if (smooth_nodes < 8 || sharp_nodes < 8 || seed_nodes < 8)
        throw ValidationError("integration node counts must be >= 8");
}

Source Source::with_pump_power(double p) const {
    Source s = *this;
    s.pump.power_w = p;
    return s;
}

Source Source::with_gamma(double g) const {
    Source s = *this;
    s.overlap.gamma = g;
    return s;
}

Source Source::with_length(double l) const {
    Source s = *this;
    s.fiber.length_m = l;
    return s;
}

namespace {

constexpr double kEnvelopeLimit = 100.0;  // |L dk / 2| where the sinc^2 envelope reaches 1e-4

SpectralWindow window_from_curves(const dispersion::ModeCurve& triplet, double kp0, double omega0, double length) {
    const double wc = omega0 / 3.0;
    auto x = [&](double d) {
        return 0.5 * length * (triplet.k(wc + d) + 2.0 * triplet.k(wc - 0.5 * d) - kp0);
    };
    auto edge = [&](double sign) {
        const double lim = sign > 0 ? std::min(triplet.omega_max() - wc, 2.0 * (wc - triplet.omega_min()))
                                    : std::min(wc - triplet.omega_min(), 2.0 * (triplet.omega_max() - wc));
        const int steps = 4000;
        double prev = 0.0;
        for (int i = 1; i <= steps; ++i) {
            const double d = sign * lim * static_cast<double>(i) / steps * 0.999;
            if (std::abs(x(d)) >= kEnvelopeLimit) {
                return numerics::find_root_bracketed([&](double t) { return std::abs(x(t)) - kEnvelopeLimit; }, prev,
                                                     d, 1e-10);
            }
            prev = d;
        }
        throw NumericalError("phase-matched band extends beyond the provisional dispersion span");
    };
    const double lo = wc + edge(-1.0), hi = wc + edge(1.0);
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

}  // namespace

SpectralWindow default_window(const dispersion::FiberSpec& fiber, const PumpSpec& pump,
                              const dispersion::ModeLabel& triplet_mode) {
    const double wc = pump.omega0 / 3.0;
    const auto grid = dispersion::uniform_grid(0.72 * wc, 1.36 * wc, 384);
    const auto curve = dispersion::solve_mode(fiber, triplet_mode, grid);
    const double kp0 = dispersion::solve_neff(fiber, pump.mode, pump.omega0) * pump.omega0 / constants::c;
    return window_from_curves(curve, kp0, pump.omega0, fiber.length_m);
}

Source make_source(const dispersion::FiberSpec& fiber, const PumpSpec& pump, const dispersion::ModeLabel& triplet_mode,
                   SpectralWindow window, dispersion::OverlapResult overlap, dispersion::ModeCurve pump_curve,
                   dispersion::ModeCurve triplet_curve) {
    pump.validate();
    if (!(window.omega_max > window.omega_min) || !(window.omega_min > 0.0))
        throw ValidationError("spectral window needs 0 < omega_min < omega_max");
    if (!triplet_curve.contains(window.omega_min) || !triplet_curve.contains(window.omega_max))
        throw ValidationError("triplet mode curve does not cover the spectral window");
    if (!pump_curve.contains(pump.omega0)) throw ValidationError("pump mode curve does not cover the pump frequency");
    if (!(overlap.gamma >= 0.0)) throw ValidationError("nonlinear coefficient must be >= 0");
    Source s;
    s.fiber = fiber;
    s.pump = pump;
    s.triplet_mode = triplet_mode;
    s.window = window;
    s.overlap = overlap;
    s.pump_curve = std::make_shared<const dispersion::ModeCurve>(std::move(pump_curve));
    s.triplet_curve = std::make_shared<const dispersion::ModeCurve>(std::move(triplet_curve));
    return s;
}

Source build_source(const dispersion::FiberSpec& fiber, const PumpSpec& pump, const dispersion::ModeLabel& triplet_mode,
                    std::optional<SpectralWindow> window, double chi3, const SourceOptions& opts) {
    fiber.validate();
    pump.validate();
    if (opts.curve_points < 16) throw ValidationError("mode curves need at least 16 points");
    const CurveProvider provider = opts.provider ? opts.provider : CurveProvider(dispersion::solve_mode);
    const SpectralWindow win = window ? *window : default_window(fiber, pump, triplet_mode);
    if (!(win.omega_max > win.omega_min) || !(win.omega_min > 0.0))
        throw ValidationError("spectral window needs 0 < omega_min < omega_max");

    const double pad = opts.window_padding * win.width();
    auto tgrid = dispersion::uniform_grid(win.omega_min - pad, win.omega_max + pad, opts.curve_points);
    double half_span = 2e-3 * pump.omega0;
    if (pump.pulsed()) half_span = std::max(half_span, (detail::kEnvelopeSigmas + 2.0) * pump.sigma);
    auto pgrid = dispersion::uniform_grid(pump.omega0 - half_span, pump.omega0 + half_span, opts.curve_points);

    auto tcurve = provider(fiber, triplet_mode, tgrid);
    auto pcurve = provider(fiber, pump.mode, pgrid);
    auto overlap = dispersion::effective_overlap(fiber, pump.mode, triplet_mode, pump.omega0, chi3);
    return make_source(fiber, pump, triplet_mode, win, overlap, std::move(pcurve), std::move(tcurve));
}

double delta_k(const dispersion::ModeCurve& pump, const dispersion::ModeCurve& triplet, double w1, double w2,
               double w3) {
    return -pump.k(w1 + w2 + w3) + triplet.k(w1) + triplet.k(w2) + triplet.k(w3);
}

double delta_k(const Source& s, double w1, double w2, double w3) {
    return delta_k(*s.pump_curve, *s.triplet_curve, w1, w2, w3);
}

double pump_envelope(const PumpSpec& pump, double w1, double w2, double w3) {
    if (pump.kind != SpectralKind::Pulsed)
        throw ValidationError("pump envelope is defined for pulsed pumps only; cw paths use the closed-form limits");
    const double d = (w1 + w2 + w3 - pump.omega0) / pump.sigma;
    return std::exp(-d * d);
}

double sinc(double x) { return detail::sinc(x); }

double phase_matching(double length, double dk) {
    if (!(length > 0.0)) throw ValidationError("fiber length must be > 0");
    return detail::sinc(0.5 * length * dk);
}

void require_converged(const numerics::ConvergenceReport& r, const std::string& what) {
    if (!r.converged) {
        std::ostringstream os;
        os << what << " did not converge after " << r.levels << " levels: estimate " << r.value
           << ", relative change " << r.rel_error;
        throw ConvergenceError(os.str(), r.value, r.rel_error);
    }
}

}  // namespace tripletforge::jsa
