#include "tripletforge/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kernel.hpp"
#include "tripletforge/constants.hpp"
#include "tripletforge/errors.hpp"

namespace tripletforge::tomography {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Local node spacing of a (possibly nonuniform) grid.
double spacing(const std::vector<double>& g, std::size_t i) {
    if (g.size() < 2) return 0.0;
    if (i == 0) return std::abs(g[1] - g[0]);
    if (i + 1 == g.size()) return std::abs(g[i] - g[i - 1]);
    return 0.5 * std::abs(g[i + 1] - g[i - 1]);
}

std::vector<double> to_omega(const std::vector<double>& lambdas) {
    std::vector<double> w(lambdas.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = constants::omega_from_lambda(lambdas[i]);
    return w;
}

seeding::SeedSpec cw_seed(double omega, double power, double linewidth) {
    seeding::SeedSpec s;
    s.kind = SpectralKind::Monochromatic;
    s.omega = omega;
    s.power_w = power;
    s.linewidth_hz = linewidth;
    return s;
}

struct SeedTerms {
    double n1 = 0.0, n2_self = 0.0, beta2 = 0.0, dk = 0.0;
    std::vector<double> n1_omega, self_omega;  // photons/s per rad/s
};

std::vector<double> k1_weights(const jsa::Source& src, const jsa::FrequencyAxis& ax) {
    std::vector<double> w(ax.count);
    for (std::size_t k = 0; k < ax.count; ++k) {
        const double h = (k == 0 || k + 1 == ax.count) ? 0.5 * ax.step() : ax.step();
        w[k] = h * src.triplet_curve->dk_domega_unchecked(ax.at(k));
    }
    return w;
}

}  // namespace

void SetScanConfig::validate() const {
    if (lambda_i_m.empty() || lambda_j_m.empty()) throw ValidationError("SET scan needs non-empty seed wavelength grids");
    for (double l : lambda_i_m)
        if (!(l > 0.0)) throw ValidationError("SET seed wavelengths must be > 0");
    for (double l : lambda_j_m)
        if (!(l > 0.0)) throw ValidationError("SET seed wavelengths must be > 0");
    if (!(power_i_w >= 0.0) || !(power_j_w >= 0.0)) throw ValidationError("SET seed powers must be >= 0");
    if (!(linewidth_hz > 0.0)) throw ValidationError("SET seed linewidth must be > 0");
    if (output.count < 2 || !(output.omega_max > output.omega_min))
        throw ValidationError("SET output axis needs >= 2 points and omega_min < omega_max");
}

double delta_k_from_linewidth(const dispersion::ModeCurve& curve, double omega, double linewidth_hz) {
    if (!(linewidth_hz > 0.0)) throw ValidationError("seed linewidth must be > 0");
    return 2.0 * std::numbers::pi * linewidth_hz * curve.dk_domega(omega);
}

double truth_density(const jsa::Source& src, const jsa::SpontaneousRate& rate, double w1, double wi, double wj) {
    if (!src.pump.pulsed()) throw ValidationError("SET ground truth needs a pulsed pump");
    const detail::Kernel kr(src);
    if (!kr.in_window(w1) || !kr.in_window(wi) || !kr.in_window(wj)) return 0.0;
    // Same summation order as the seeded double-overlap path.
    if (wj < wi) std::swap(wi, wj);
    const double sum = w1 + wi + wj;
    if (!kr.in_pump_support(sum)) return 0.0;
    if (!(rate.integral > 0.0)) throw NumericalError("spontaneous-rate integral is zero; |phi|^2 undefined");
    const double f = kr.xi(sum) * detail::sinc(kr.sinc_arg(kr.k1(w1) + kr.k1(wi) + kr.k1(wj) - kr.kp(sum)));
    const double weight = (w1 / kr.n(w1)) * (wi / kr.n(wi)) * (wj / kr.n(wj));
    const auto& tc = *src.triplet_curve;
    const double v = 1.0 / (tc.dk_domega_unchecked(w1) * tc.dk_domega_unchecked(wi) * tc.dk_domega_unchecked(wj));
    return 0.5 * rate.n0_per_s * v * weight * f * f / (kr.n0 * rate.integral);
}

SetRaster simulate_set_scan(const jsa::Source& src, const jsa::SpontaneousRate& rate, const SetScanConfig& scan,
                            const jsa::IntegrationSettings& st) {
    scan.validate();
    if (!src.pump.pulsed())
        throw ValidationError("SET raster needs a pulsed pump; a cw pump pins omega_1 and leaves no spectrum to resolve");
    const auto& tc = *src.triplet_curve;
    if (!tc.contains(scan.output.omega_min) || !tc.contains(scan.output.omega_max))
        throw WindowError("SET output axis exceeds the triplet dispersion span", src.window.omega_min,
                          src.window.omega_max);

    SetRaster r;
    r.scan = scan;
    r.n0 = rate.n0_per_s;
    r.notes.push_back("seeds: cw, |beta|^2 = P/(hbar omega) photons per second");
    r.notes.push_back("delta_k = 2 pi delta_nu dk/domega, delta_nu = " + std::to_string(scan.linewidth_hz) + " Hz");
    r.notes.push_back("spectra are N2^{ij}(k1) per unit k1 on the output nodes");
    if (scan.skip_diagonal) r.notes.push_back("points within one raster cell of the degeneracy diagonal are skipped");

    const auto wi = to_omega(scan.lambda_i_m);
    const auto wj = to_omega(scan.lambda_j_m);

    auto terms_for = [&](const std::vector<double>& ws, double power) {
        std::vector<SeedTerms> t(ws.size());
        for (std::size_t i = 0; i < ws.size(); ++i) {
            const auto s = cw_seed(ws[i], power, scan.linewidth_hz);
            t[i].beta2 = seeding::seed_photon_number(s, src.pump);
            t[i].dk = tc.contains(ws[i]) ? delta_k_from_linewidth(tc, ws[i], scan.linewidth_hz) : 0.0;
            const auto t1 = seeding::theta_single(src, rate, s, scan.output, st);
            const auto t2 = seeding::theta_double(src, rate, s, s, scan.output, st);
            const double k1 = 2.0 * rate.n0_per_s * t[i].beta2;
            const double k2 = 0.5 * rate.n0_per_s * t[i].beta2 * t[i].beta2;
            t[i].n1 = k1 * t1.value;
            t[i].n2_self = k2 * t2.value;
            t[i].n1_omega.resize(t1.spectrum.size());
            t[i].self_omega.resize(t2.spectrum.size());
            for (std::size_t k = 0; k < t1.spectrum.size(); ++k) t[i].n1_omega[k] = k1 * t1.spectrum[k];
            for (std::size_t k = 0; k < t2.spectrum.size(); ++k) t[i].self_omega[k] = k2 * t2.spectrum[k];
        }
        return t;
    };
    const auto ti = terms_for(wi, scan.power_i_w);
    const auto tj = terms_for(wj, scan.power_j_w);

    r.k1_weights = k1_weights(src, scan.output);
    std::vector<double> v1(scan.output.count);
    for (std::size_t k = 0; k < v1.size(); ++k) v1[k] = 1.0 / tc.dk_domega_unchecked(scan.output.at(k));

    r.points.resize(wi.size() * wj.size());
    numerics::parallel_for(wi.size(), [&](std::size_t i) {
        const seeding::ThetaOptions opt{true, false};
        for (std::size_t j = 0; j < wj.size(); ++j) {
            RasterPoint& p = r.points[i * wj.size() + j];
            p.i = i;
            p.j = j;
            p.omega_i = wi[i];
            p.omega_j = wj[j];
            p.beta2_i = ti[i].beta2;
            p.beta2_j = tj[j].beta2;
            p.dk_i = ti[i].dk;
            p.dk_j = tj[j].dk;
            const double cell = 0.5 * (spacing(wi, i) + spacing(wj, j));
            const double gap = std::abs(wi[i] - wj[j]);
            if (gap == 0.0 || (scan.skip_diagonal && gap < cell * (1.0 - 1e-9))) {
                p.skipped = true;
                p.note = gap == 0.0 ? "coincident seeds" : "within one raster cell of the degeneracy diagonal";
                continue;
            }
            const auto a = cw_seed(wi[i], scan.power_i_w, scan.linewidth_hz);
            const auto b = cw_seed(wj[j], scan.power_j_w, scan.linewidth_hz);
            const auto t = seeding::theta_double(src, rate, a, b, scan.output, st, opt);
            p.spectrum.assign(scan.output.count, 0.0);
            if (t.value > 0.0) {
                const double vi = 1.0 / tc.dk_domega_unchecked(wi[i]);
                const double vj = 1.0 / tc.dk_domega_unchecked(wj[j]);
                const double amp = 0.5 * rate.n0_per_s * p.beta2_i * p.beta2_j * p.dk_i * p.dk_j;
                // Theta2 density for cw seeds is |phi(omega_1, omega_i, omega_j)|^2.
                for (std::size_t k = 0; k < p.spectrum.size(); ++k)
                    p.spectrum[k] = amp * (t.spectrum[k] * v1[k] * vi * vj);
            }
            const double kc = 2.0 * rate.n0_per_s * p.beta2_i * p.beta2_j;
            p.cross_flux = kc * t.value;
            p.single_flux = ti[i].n1 + tj[j].n1;
            p.self_flux = ti[i].n2_self + tj[j].n2_self;
            if (t.value > 0.0) {
                const auto peak = static_cast<std::size_t>(
                    std::max_element(t.spectrum.begin(), t.spectrum.end()) - t.spectrum.begin());
                const double cross = kc * t.spectrum[peak];
                const double single = ti[i].n1_omega[peak] + tj[j].n1_omega[peak];
                const double self = ti[i].self_omega[peak] + tj[j].self_omega[peak];
                p.single_ratio = single > 0.0 ? cross / single : std::numeric_limits<double>::infinity();
                p.self_ratio = self > 0.0 ? cross / self : std::numeric_limits<double>::infinity();
            }
        }
    });
    return r;
}

SetReconstruction reconstruct_jsi(const SetRaster& raster) {
    SetReconstruction rec;
    rec.ni = raster.scan.lambda_i_m.size();
    rec.nj = raster.scan.lambda_j_m.size();
    rec.nk = raster.scan.output.count;
    if (raster.points.size() != rec.ni * rec.nj) throw ValidationError("SET raster is incomplete for its grid");
    rec.values.assign(rec.ni * rec.nj * rec.nk, kNaN);
    rec.defined.assign(rec.ni * rec.nj, false);
    double max_cross = 0.0;
    for (const auto& p : raster.points)
        if (!p.skipped) max_cross = std::max(max_cross, p.cross_flux);
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < raster.points.size(); ++idx) {
        const auto& p = raster.points[idx];
        if (p.skipped) continue;
        const double norm = p.beta2_i * p.beta2_j * p.dk_i * p.dk_j;
        if (!(norm > 0.0)) {
            rec.notes.push_back("point (" + std::to_string(p.i) + ", " + std::to_string(p.j) +
                                "): zero seed power or bandwidth, reconstruction undefined");
            continue;
        }
        if (p.spectrum.size() != rec.nk) throw ValidationError("SET raster spectrum has the wrong length");
        for (std::size_t k = 0; k < rec.nk; ++k) rec.values[idx * rec.nk + k] = p.spectrum[k] / norm;
        rec.defined[idx] = true;
        if (max_cross > 0.0 && p.cross_flux >= 1e-2 * max_cross) min_ratio = std::min(min_ratio, p.single_ratio);
    }
    rec.min_contamination_ratio = min_ratio;
    rec.marginal = k1_marginal(raster, rec.values);
    return rec;
}

std::vector<double> k1_marginal(const SetRaster& raster, const std::vector<double>& values) {
    const std::size_t nk = raster.scan.output.count;
    if (values.size() != raster.points.size() * nk) throw ValidationError("map does not match the raster grid");
    const auto& w = raster.k1_weights;
    if (w.size() != nk) throw ValidationError("raster lacks k1 weights");
    std::vector<double> out(raster.points.size(), kNaN);
    for (std::size_t idx = 0; idx < raster.points.size(); ++idx) {
        std::vector<double> row(nk);
        bool ok = true;
        for (std::size_t k = 0; k < nk && ok; ++k) {
            const double v = values[idx * nk + k];
            ok = !std::isnan(v);
            row[k] = v * w[k];
        }
        if (ok) out[idx] = numerics::pairwise_sum(row);
    }
    return out;
}

std::vector<double> truth_on_raster(const jsa::Source& src, const jsa::SpontaneousRate& rate, const SetRaster& raster) {
    const std::size_t nk = raster.scan.output.count;
    std::vector<double> out(raster.points.size() * nk, kNaN);
    numerics::parallel_for(raster.points.size(), [&](std::size_t idx) {
        const auto& p = raster.points[idx];
        if (p.skipped) return;
        for (std::size_t k = 0; k < nk; ++k)
            out[idx * nk + k] = truth_density(src, rate, raster.scan.output.at(k), p.omega_i, p.omega_j);
    });
    return out;
}

std::vector<double> cell_averaged_truth(const jsa::Source& src, const jsa::SpontaneousRate& rate,
                                        const SetRaster& raster, std::size_t sub) {
    if (sub < 1) throw ValidationError("cell averaging needs at least one sample per axis");
    const auto wi = to_omega(raster.scan.lambda_i_m);
    const auto wj = to_omega(raster.scan.lambda_j_m);
    const std::size_t nk = raster.scan.output.count;
    std::vector<double> out(raster.points.size() * nk, kNaN);
    numerics::parallel_for(raster.points.size(), [&](std::size_t idx) {
        const auto& p = raster.points[idx];
        if (p.skipped) return;
        const double di = spacing(wi, p.i), dj = spacing(wj, p.j);
        for (std::size_t k = 0; k < nk; ++k) {
            const double w1 = raster.scan.output.at(k);
            double acc = 0.0;
            for (std::size_t a = 0; a < sub; ++a) {
                const double oi = ((static_cast<double>(a) + 0.5) / static_cast<double>(sub) - 0.5) * di;
                for (std::size_t b = 0; b < sub; ++b) {
                    const double oj = ((static_cast<double>(b) + 0.5) / static_cast<double>(sub) - 0.5) * dj;
                    acc += truth_density(src, rate, w1, p.omega_i + oi, p.omega_j + oj);
                }
            }
            out[idx * nk + k] = acc / static_cast<double>(sub * sub);
        }
    });
    return out;
}

double fidelity(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw ValidationError("fidelity needs maps on the same grid");
    std::vector<double> sp, sq, spq;
    sp.reserve(p.size());
    sq.reserve(p.size());
    spq.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (std::isnan(p[i]) || std::isnan(q[i])) continue;
        if (p[i] < 0.0 || q[i] < 0.0) throw ValidationError("fidelity needs nonnegative maps");
        sp.push_back(p[i]);
        sq.push_back(q[i]);
        spq.push_back(std::sqrt(p[i] * q[i]));
    }
    const double a = numerics::pairwise_sum(sp), b = numerics::pairwise_sum(sq);
    if (!(a > 0.0) || !(b > 0.0)) throw NumericalError("fidelity is undefined for an all-zero map");
    return std::min(1.0, numerics::pairwise_sum(spq) / std::sqrt(a * b));
}

double integrate_reconstruction(const jsa::Source& src, const SetRaster& raster, const SetReconstruction& rec) {
    const auto& tc = *src.triplet_curve;
    const auto wi = to_omega(raster.scan.lambda_i_m);
    const auto wj = to_omega(raster.scan.lambda_j_m);
    const auto& dk1 = raster.k1_weights;
    std::vector<double> terms(rec.ni * rec.nj, 0.0);
    for (std::size_t i = 0; i < rec.ni; ++i) {
        for (std::size_t j = 0; j < rec.nj; ++j) {
            const std::size_t idx = i * rec.nj + j;
            if (!rec.defined[idx]) continue;
            if (!tc.contains(wi[i]) || !tc.contains(wj[j])) continue;
            const double dki = spacing(wi, i) * tc.dk_domega_unchecked(wi[i]);
            const double dkj = spacing(wj, j) * tc.dk_domega_unchecked(wj[j]);
            std::vector<double> row(rec.nk);
            for (std::size_t k = 0; k < rec.nk; ++k) row[k] = rec.values[idx * rec.nk + k] * dk1[k];
            terms[idx] = numerics::pairwise_sum(row) * dki * dkj;
        }
    }
    return numerics::pairwise_sum(terms);
}

}  // namespace tripletforge::tomography
