#include "tripletforge/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <tuple>

#include "kernel.hpp"
#include "tripletforge/constants.hpp"
#include "tripletforge/errors.hpp"

namespace tripletforge::seeding {

using numerics::Interval;
using numerics::pairwise_sum;
using cplx = std::complex<double>;

namespace {

constexpr double kSeedSigmas = 6.0;
constexpr double kExcludeSigmas = 3.0;
constexpr double kExcludeCells = 2.0;
const double kPi = std::numbers::pi;

double wt(const detail::Kernel& kr, double w) { return w / kr.n(w); }

double envelope(const SeedSpec& s, double w) {
    const double d = (w - s.omega) / s.sigma;
    return std::exp(-d * d);
}

std::optional<Interval> intersect(Interval a, Interval b) {
    const Interval r{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
    if (!(r.hi > r.lo)) return std::nullopt;
    return r;
}

std::optional<Interval> seed_band(const SeedSpec& s, const detail::Kernel& kr) {
    return intersect({s.omega - kSeedSigmas * s.sigma, s.omega + kSeedSigmas * s.sigma}, {kr.wmin, kr.wmax});
}

std::vector<Interval> subtract(Interval d, std::optional<Interval> ex) {
    if (!ex || ex->hi <= d.lo || ex->lo >= d.hi) return {d};
    std::vector<Interval> out;
    if (ex->lo > d.lo) out.push_back({d.lo, ex->lo});
    if (ex->hi < d.hi) out.push_back({ex->hi, d.hi});
    return out;
}

struct Nodes {
    std::vector<double> x, w;
};

Nodes nodes_on(Interval iv, std::size_t base, int level, const jsa::IntegrationSettings& st) {
    auto s = detail::rule(iv, base, level, st);
    return {std::move(s.x), std::move(s.w)};
}

// A Theta case: prefactor * integral of density(w1) over domain, divided by |c3|^2.
struct Plan {
    double prefactor = 0.0;
    std::optional<Interval> domain;
    std::size_t outer_nodes = 64;
    std::optional<Interval> excluded;
    std::function<double(double w1, int level)> density;
};

double common_k(const jsa::Source& src) {
    const double n0 = src.n0(), l = src.length(), g = src.gamma(), w0 = src.pump.omega0;
    return constants::hbar * src.pump.power_w * n0 * n0 * n0 * l * l * g * g / (w0 * w0);
}

double alpha_p2_over_power_term(const jsa::Source& src, double tau) {
    // hbar^2 |alpha_p|^2 n0^3 L^2 gamma^2 / omega0 with |alpha_p|^2 = P tau / (hbar omega0)
    const double n0 = src.n0(), l = src.length(), g = src.gamma(), w0 = src.pump.omega0;
    const double alpha2 = src.pump.power_w * tau / (constants::hbar * w0);
    return constants::hbar * constants::hbar * alpha2 * n0 * n0 * n0 * l * l * g * g / w0;
}

Plan plan_single(const jsa::Source& src, const detail::Kernel& kr, const SeedSpec& s, const jsa::FrequencyAxis& out,
                 const jsa::IntegrationSettings& st, bool exclude) {
    Plan p;
    const Interval win{kr.wmin, kr.wmax};
    const double w0 = kr.omega0;
    const bool pump_pulsed = src.pump.pulsed();
    const double K = common_k(src);
    const double sp = src.pump.sigma, R = src.pump.rep_rate_hz;

    if (s.pulsed()) {
        if (exclude) p.excluded = Interval{s.omega - kExcludeSigmas * s.sigma, s.omega + kExcludeSigmas * s.sigma};
        const auto band = seed_band(s, kr);
        if (!band) return p;
        if (pump_pulsed) {
            p.prefactor = 27.0 * K / (4.0 * kPi * kPi * kPi * sp * s.sigma * R);
            p.domain = win;
            p.outer_nodes = st.smooth_nodes;
            const double e = kr.omega0 + detail::kEnvelopeSigmas * sp, b = kr.omega0 - detail::kEnvelopeSigmas * sp;
            p.density = [&kr, &st, s, band = *band, e, b, win](double w1, int level) {
                // s = w1 + w3 with w3 in the window and s + w2 inside the pump support.
                const auto srange = intersect({w1 + win.lo, w1 + win.hi}, {b - band.hi, e - band.lo});
                if (!srange) return 0.0;
                const Nodes sn = nodes_on(*srange, st.sharp_nodes, level, st);
                const Nodes bn = nodes_on(band, st.seed_nodes, level, st);
                std::vector<cplx> amp(bn.x.size());
                std::vector<double> k2(bn.x.size());
                for (std::size_t j = 0; j < bn.x.size(); ++j) {
                    const double w2 = bn.x[j];
                    amp[j] = bn.w[j] * std::sqrt(wt(kr, w2)) * envelope(s, w2) *
                             std::polar(1.0, -w2 * s.delay_s);
                    k2[j] = kr.k1(w2);
                }
                const double k1 = kr.k1(w1);
                std::vector<double> re(bn.x.size()), im(bn.x.size()), outer(sn.x.size());
                for (std::size_t m = 0; m < sn.x.size(); ++m) {
                    const double w3 = sn.x[m] - w1;
                    if (!kr.in_window(w3)) {
                        outer[m] = 0.0;
                        continue;
                    }
                    const double k13 = k1 + kr.k1(w3);
                    for (std::size_t j = 0; j < bn.x.size(); ++j) {
                        const double sum = sn.x[m] + bn.x[j];
                        if (!kr.in_pump_support(sum)) {
                            re[j] = im[j] = 0.0;
                            continue;
                        }
                        const double x = kr.sinc_arg(k13 + k2[j] - kr.kp(sum));
                        const double mag = kr.xi(sum) * detail::sinc(x);
                        const cplx v = amp[j] * mag * cplx(std::cos(x), std::sin(x));
                        re[j] = v.real();
                        im[j] = v.imag();
                    }
                    const double a = pairwise_sum(re), c = pairwise_sum(im);
                    outer[m] = sn.w[m] * wt(kr, w3) * (a * a + c * c);
                }
                return wt(kr, w1) * pairwise_sum(outer);
            };
        } else {
            const double tau = 2.0 / s.sigma;
            p.prefactor = 27.0 * alpha_p2_over_power_term(src, tau) / (4.0 * std::sqrt(2.0) * s.sigma * std::pow(kPi, 2.5));
            p.domain = intersect(win, {w0 - band->hi - win.hi, w0 - band->lo - win.lo});
            p.outer_nodes = st.sharp_nodes;
            p.density = [&kr, &st, s, band = *band](double w1, int level) {
                const Nodes bn = nodes_on(band, st.seed_nodes, level, st);
                const double k1 = kr.k1(w1) - kr.kp0;
                std::vector<double> terms(bn.x.size());
                for (std::size_t j = 0; j < bn.x.size(); ++j) {
                    const double w2 = bn.x[j];
                    const double w3 = kr.omega0 - w1 - w2;
                    if (!kr.in_window(w3)) {
                        terms[j] = 0.0;
                        continue;
                    }
                    const double b = envelope(s, w2);
                    const double xs = detail::sinc(kr.sinc_arg(k1 + kr.k1(w2) + kr.k1(w3)));
                    terms[j] = bn.w[j] * wt(kr, w2) * wt(kr, w3) * b * b * xs * xs;
                }
                return wt(kr, w1) * pairwise_sum(terms);
            };
        }
        return p;
    }

    // Monochromatic seed.
    if (exclude) p.excluded = Interval{s.omega - kExcludeCells * out.step(), s.omega + kExcludeCells * out.step()};
    if (!kr.in_window(s.omega)) return p;
    const double ws = s.omega;
    if (pump_pulsed) {
        p.prefactor = 27.0 * K / (4.0 * std::sqrt(2.0) * std::pow(kPi, 2.5) * sp * R);
        const double e = kr.omega0 + detail::kEnvelopeSigmas * sp, b = kr.omega0 - detail::kEnvelopeSigmas * sp;
        p.domain = intersect(win, {b - ws - win.hi, e - ws - win.lo});
        p.outer_nodes = st.smooth_nodes;
        p.density = [&kr, &st, ws, b, e, win](double w1, int level) {
            const auto r2 = intersect(win, {b - w1 - ws, e - w1 - ws});
            if (!r2) return 0.0;
            const Nodes n2 = nodes_on(*r2, st.sharp_nodes, level, st);
            const double k1s = kr.k1(w1) + kr.k1(ws);
            std::vector<double> terms(n2.x.size());
            for (std::size_t j = 0; j < n2.x.size(); ++j) {
                const double w2 = n2.x[j];
                const double sum = w1 + w2 + ws;
                if (!kr.in_pump_support(sum)) {
                    terms[j] = 0.0;
                    continue;
                }
                const double f = kr.xi(sum) * detail::sinc(kr.sinc_arg(k1s + kr.k1(w2) - kr.kp(sum)));
                terms[j] = n2.w[j] * wt(kr, w2) * f * f;
            }
            return wt(kr, w1) * wt(kr, ws) * pairwise_sum(terms);
        };
    } else {
        p.prefactor = 27.0 * K / (8.0 * kPi * kPi);
        p.domain = intersect(win, {w0 - ws - win.hi, w0 - ws - win.lo});
        p.outer_nodes = 2 * st.sharp_nodes;
        p.density = [&kr, ws](double w1, int) {
            const double w3 = kr.omega0 - w1 - ws;
            if (!kr.in_window(w3)) return 0.0;
            const double xs = detail::sinc(kr.sinc_arg(kr.k1(w1) + kr.k1(w3) + kr.k1(ws) - kr.kp0));
            return wt(kr, w1) * wt(kr, ws) * wt(kr, w3) * xs * xs;
        };
    }
    return p;
}

Plan plan_double(const jsa::Source& src, const detail::Kernel& kr, const SeedSpec& a, const SeedSpec& b,
                 const jsa::IntegrationSettings& st) {
    Plan p;
    const Interval win{kr.wmin, kr.wmax};
    const double w0 = kr.omega0;
    const bool pump_pulsed = src.pump.pulsed();
    const double K = common_k(src);
    const double sp = src.pump.sigma, R = src.pump.rep_rate_hz;

    if (a.pulsed()) {
        const auto ba = seed_band(a, kr), bb = seed_band(b, kr);
        if (!ba || !bb) return p;
        if (pump_pulsed) {
            p.prefactor = 27.0 * K / (2.0 * std::sqrt(2.0) * a.sigma * b.sigma * sp * std::pow(kPi, 3.5) * R);
            const double e = w0 + detail::kEnvelopeSigmas * sp, s0 = w0 - detail::kEnvelopeSigmas * sp;
            p.domain = intersect(win, {s0 - ba->hi - bb->hi, e - ba->lo - bb->lo});
            p.outer_nodes = st.sharp_nodes;
            p.density = [&kr, &st, a, b, ba = *ba, bb = *bb](double w1, int level) {
                const Nodes na = nodes_on(ba, st.seed_nodes, level, st);
                const Nodes nb = nodes_on(bb, st.seed_nodes, level, st);
                std::vector<cplx> ca(na.x.size()), cb(nb.x.size());
                std::vector<double> ka(na.x.size()), kb(nb.x.size());
                for (std::size_t j = 0; j < na.x.size(); ++j) {
                    ca[j] = na.w[j] * std::sqrt(wt(kr, na.x[j])) * envelope(a, na.x[j]) *
                            std::polar(1.0, -na.x[j] * a.delay_s);
                    ka[j] = kr.k1(na.x[j]);
                }
                for (std::size_t m = 0; m < nb.x.size(); ++m) {
                    cb[m] = nb.w[m] * std::sqrt(wt(kr, nb.x[m])) * envelope(b, nb.x[m]) *
                            std::polar(1.0, -nb.x[m] * b.delay_s);
                    kb[m] = kr.k1(nb.x[m]);
                }
                const double k1 = kr.k1(w1);
                std::vector<double> re(na.x.size() * nb.x.size()), im(re.size());
                for (std::size_t j = 0; j < na.x.size(); ++j) {
                    for (std::size_t m = 0; m < nb.x.size(); ++m) {
                        const std::size_t idx = j * nb.x.size() + m;
                        const double sum = w1 + na.x[j] + nb.x[m];
                        if (!kr.in_pump_support(sum)) {
                            re[idx] = im[idx] = 0.0;
                            continue;
                        }
                        const double x = kr.sinc_arg(k1 + ka[j] + kb[m] - kr.kp(sum));
                        const cplx v = ca[j] * cb[m] * (kr.xi(sum) * detail::sinc(x)) * cplx(std::cos(x), std::sin(x));
                        re[idx] = v.real();
                        im[idx] = v.imag();
                    }
                }
                const double x = pairwise_sum(re), y = pairwise_sum(im);
                return wt(kr, w1) * (x * x + y * y);
            };
        } else {
            const double tau = 2.0 / std::sqrt(a.sigma * b.sigma);
            p.prefactor = 2.0 * 3.375 * alpha_p2_over_power_term(src, tau) / (a.sigma * b.sigma * kPi * kPi * kPi);
            p.domain = intersect(win, {w0 - ba->hi - bb->hi, w0 - ba->lo - bb->lo});
            p.outer_nodes = 2 * st.seed_nodes;
            p.density = [&kr, &st, a, b, ba = *ba, bb = *bb](double w1, int level) {
                // w3 carries seed b, w2 = w0 - w1 - w3 carries seed a.
                const auto r3 = intersect(bb, {kr.omega0 - w1 - ba.hi, kr.omega0 - w1 - ba.lo});
                if (!r3) return 0.0;
                const Nodes n3 = nodes_on(*r3, st.seed_nodes, level, st);
                const double k1 = kr.k1(w1) - kr.kp0;
                const double sw1 = std::sqrt(wt(kr, w1));
                std::vector<double> terms(n3.x.size());
                for (std::size_t j = 0; j < n3.x.size(); ++j) {
                    const double w3 = n3.x[j];
                    const double w2 = kr.omega0 - w1 - w3;
                    const double xs = detail::sinc(kr.sinc_arg(k1 + kr.k1(w2) + kr.k1(w3)));
                    terms[j] = n3.w[j] * std::sqrt(wt(kr, w2) * wt(kr, w3)) * envelope(a, w2) * envelope(b, w3) * xs;
                }
                const double v = sw1 * pairwise_sum(terms);
                return v * v;
            };
        }
        return p;
    }

    if (!kr.in_window(a.omega) || !kr.in_window(b.omega)) return p;
    const double wa = a.omega, wb = b.omega;
    if (pump_pulsed) {
        p.prefactor = std::sqrt(2.0) * 3.375 * K / (std::pow(kPi, 2.5) * sp * R);
        const double e = w0 + detail::kEnvelopeSigmas * sp, s0 = w0 - detail::kEnvelopeSigmas * sp;
        p.domain = intersect(win, {s0 - wa - wb, e - wa - wb});
        p.outer_nodes = st.sharp_nodes;
        p.density = [&kr, wa, wb](double w1, int) {
            const double sum = w1 + wa + wb;
            if (!kr.in_pump_support(sum)) return 0.0;
            const double f = kr.xi(sum) * detail::sinc(kr.sinc_arg(kr.k1(w1) + kr.k1(wa) + kr.k1(wb) - kr.kp(sum)));
            return wt(kr, w1) * wt(kr, wa) * wt(kr, wb) * f * f;
        };
    }
    // cw pump with cw seeds has no integral; handled by the caller.
    return p;
}

ThetaResult evaluate(const Plan& p, const jsa::SpontaneousRate& rate, const jsa::FrequencyAxis& out,
                     const jsa::IntegrationSettings& st, const ThetaOptions& opt) {
    ThetaResult r;
    r.excluded = p.excluded;
    if (opt.spectrum) r.spectrum.assign(out.count, 0.0);
    if (!p.domain || !p.density || p.prefactor == 0.0) {
        r.report.converged = true;
        r.report.levels = 0;
        r.warnings.push_back("seed band lies outside the phase-matched support; overlap set to zero");
        return r;
    }
    const auto pieces = subtract(*p.domain, p.excluded);
    auto integral_at = [&](int level) {
        std::vector<double> parts;
        for (const auto& iv : pieces) {
            if (!(iv.hi > iv.lo)) continue;
            const Nodes n = nodes_on(iv, p.outer_nodes, level, st);
            const auto vals = numerics::parallel_map(n.x.size(), [&](std::size_t i) { return n.w[i] * p.density(n.x[i], level); });
            parts.push_back(pairwise_sum(vals));
        }
        return pairwise_sum(parts);
    };
    r.report = numerics::refine(integral_at, st.rel_tol, st.max_refinements);
    jsa::require_converged(r.report, "seeded overlap integral");
    const double c3 = rate.c3sq;
    r.unnormalized = p.prefactor * r.report.value;
    if (!(c3 > 0.0)) {
        r.warnings.push_back("spontaneous rate is zero; overlap normalisation undefined, reported as zero");
        return r;
    }
    r.value = r.unnormalized / c3;
    if (opt.spectrum) {
        const int level = std::max(0, r.report.levels - 1);
        const auto vals = numerics::parallel_map(out.count, [&](std::size_t i) {
            const double w1 = out.at(i);
            if (!p.domain->contains(w1)) return 0.0;
            if (p.excluded && p.excluded->contains(w1)) return 0.0;
            return p.prefactor * p.density(w1, level) / c3;
        });
        r.spectrum = vals;
    }
    return r;
}

void check_rate(const jsa::Source& src, const jsa::SpontaneousRate& rate) {
    if (rate.pump_kind != src.pump.kind) throw ValidationError("spontaneous rate was computed for a different pump kind");
}

}  // namespace

void SeedSpec::validate() const {
    if (!(omega > 0.0)) throw ValidationError("seed frequency must be > 0");
    if (!(power_w >= 0.0)) throw ValidationError("seed power must be >= 0");
    if (kind == SpectralKind::Pulsed) {
        if (!(sigma > 0.0)) throw ValidationError("pulsed seed needs bandwidth sigma > 0");
        if (!(rep_rate_hz > 0.0)) throw ValidationError("pulsed seed needs a repetition rate > 0");
    } else if (!(linewidth_hz > 0.0)) {
        throw ValidationError("cw seed needs linewidth > 0");
    }
}

double seed_photon_number(const SeedSpec& seed, const jsa::PumpSpec& /*pump*/) {
    const double e = constants::hbar * seed.omega;
    if (seed.pulsed()) {
        if (!(seed.rep_rate_hz > 0.0)) throw ValidationError("pulsed seed needs a repetition rate");
        return seed.power_w / (seed.rep_rate_hz * e);
    }
    return seed.power_w / e;
}

double pump_photons_per_seed(const jsa::PumpSpec& pump, const SeedSpec& seed) {
    if (!seed.pulsed()) throw ValidationError("pump photons per seed pulse need a pulsed seed");
    return pump.power_w * (2.0 / seed.sigma) / (constants::hbar * pump.omega0);
}

std::string case_name(const jsa::PumpSpec& pump, SpectralKind seed_kind) {
    return to_string(pump.kind) + "-pump/" + to_string(seed_kind) + "-seed";
}

jsa::FrequencyAxis output_axis(const jsa::SpectralWindow& w, std::size_t count) {
    if (count < 8) throw ValidationError("output spectral axis needs >= 8 points");
    return {w.omega_min, w.omega_max, count};
}

ThetaResult theta_single(const jsa::Source& src, const jsa::SpontaneousRate& rate, const SeedSpec& seed,
                         const jsa::FrequencyAxis& output, const jsa::IntegrationSettings& st,
                         const ThetaOptions& opt) {
    seed.validate();
    st.validate();
    check_rate(src, rate);
    const detail::Kernel kr(src);
    const Plan p = plan_single(src, kr, seed, output, st, opt.exclude_seed_band);
    ThetaResult r = evaluate(p, rate, output, st, opt);
    r.case_name = case_name(src.pump, seed.kind);
    return r;
}

ThetaResult theta_double(const jsa::Source& src, const jsa::SpontaneousRate& rate, const SeedSpec& a0,
                         const SeedSpec& b0, const jsa::FrequencyAxis& output, const jsa::IntegrationSettings& st,
                         const ThetaOptions& opt) {
    a0.validate();
    b0.validate();
    st.validate();
    check_rate(src, rate);
    if (a0.kind != b0.kind) throw ValidationError("mixed pulsed/cw seed pairs are not supported");
    // Canonical order makes the result independent of argument order.
    const bool swap = std::tie(b0.omega, b0.sigma, b0.delay_s) < std::tie(a0.omega, a0.sigma, a0.delay_s);
    const SeedSpec& a = swap ? b0 : a0;
    const SeedSpec& b = swap ? a0 : b0;
    const detail::Kernel kr(src);
    ThetaResult r;
    r.case_name = case_name(src.pump, a.kind);
    if (!a.pulsed() && !src.pump.pulsed()) {
        // Energy conservation pins the output to w1 = w0 - wa - wb.
        if (opt.spectrum) r.spectrum.assign(output.count, 0.0);
        r.report.converged = true;
        r.report.levels = 1;
        const double w1 = kr.omega0 - a.omega - b.omega;
        if (!kr.in_window(a.omega) || !kr.in_window(b.omega) || !kr.in_window(w1)) {
            r.warnings.push_back("seed pair lies outside the phase-matched support; overlap set to zero");
            return r;
        }
        const double xs = detail::sinc(kr.sinc_arg(kr.k1(w1) + kr.k1(a.omega) + kr.k1(b.omega) - kr.kp0));
        const double pref = 3.375 * common_k(src) / (kPi * kPi);
        r.unnormalized = pref * wt(kr, w1) * wt(kr, a.omega) * wt(kr, b.omega) * xs * xs;
        r.report.value = r.unnormalized;
        r.report.history = {r.unnormalized};
        if (!(rate.c3sq > 0.0)) {
            r.warnings.push_back("spontaneous rate is zero; overlap normalisation undefined, reported as zero");
            return r;
        }
        r.value = r.unnormalized / rate.c3sq;
        if (opt.spectrum) {
            const double pos = (w1 - output.omega_min) / output.step();
            const auto i = static_cast<std::size_t>(std::llround(pos));
            if (pos >= -0.5 && i < output.count) {
                const double width = (i == 0 || i + 1 == output.count) ? 0.5 * output.step() : output.step();
                r.spectrum[i] = r.value / width;
            }
        }
        return r;
    }
    const Plan p = plan_double(src, kr, a, b, st);
    ThetaResult e = evaluate(p, rate, output, st, opt);
    e.case_name = r.case_name;
    return e;
}

LambdaSpectrum to_lambda(const jsa::FrequencyAxis& axis, const std::vector<double>& per_omega) {
    LambdaSpectrum out;
    const std::size_t n = per_omega.size();
    out.lambda_m.resize(n);
    out.density.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = n - 1 - i;
        const double w = axis.at(src);
        out.lambda_m[i] = constants::lambda_from_omega(w);
        out.density[i] = per_omega[src] * w * w / (2.0 * kPi * constants::c);
    }
    return out;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ValidationError("trapezoid needs matching arrays");
    std::vector<double> t;
    t.reserve(x.size());
    for (std::size_t i = 1; i < x.size(); ++i) t.push_back(0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]));
    return pairwise_sum(t);
}

}  // namespace tripletforge::seeding
