#include <algorithm>
#include <cmath>
#include <sstream>

#include "tripletforge/constants.hpp"
#include "tripletforge/errors.hpp"
#include "tripletforge/seeding.hpp"

namespace tripletforge::seeding {

namespace {

void add_scaled(std::vector<double>& acc, const std::vector<double>& v, double k) {
    if (acc.size() != v.size()) return;
    for (std::size_t i = 0; i < v.size(); ++i) acc[i] += k * v[i];
}

std::vector<double> scaled(const std::vector<double>& v, double k) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = k * v[i];
    return out;
}

void append_warnings(std::vector<std::string>& dst, const ThetaResult& r, const std::string& label) {
    for (const auto& w : r.warnings) dst.push_back(label + ": " + w);
}

std::string seed_label(std::size_t i) { return "seed" + std::to_string(i); }

}  // namespace

double flux_scale(const jsa::SpontaneousRate& rate, const jsa::PumpSpec& pump, const SeedSpec& seed) {
    double s = rate.n0_per_s;
    if (!pump.pulsed() && seed.pulsed()) s *= seed.rep_rate_hz;
    return s;
}

void check_disjoint(const std::vector<SeedSpec>& seeds, const jsa::FrequencyAxis& output) {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        for (std::size_t j = i + 1; j < seeds.size(); ++j) {
            const auto& a = seeds[i];
            const auto& b = seeds[j];
            if (a.kind != b.kind) throw ValidationError("mixed pulsed/cw seeds are not supported");
            const double gap = std::abs(a.omega - b.omega);
            const double need = a.pulsed() ? 3.0 * (a.sigma + b.sigma) : 2.0 * output.step();
            if (!(gap > need)) {
                std::ostringstream os;
                os << "seeds " << i << " and " << j << " overlap spectrally (separation " << gap << " rad/s, need > "
                   << need << "); multi-seed fluxes assume disjoint seed spectra";
                throw ValidationError(os.str());
            }
        }
    }
}

ThroughputReport throughput(const jsa::Source& src, const jsa::SpontaneousRate& rate,
                            const std::vector<SeedSpec>& seeds, const jsa::FrequencyAxis& output,
                            const jsa::IntegrationSettings& st) {
    if (output.count < 2) throw ValidationError("output axis needs >= 2 points");
    for (const auto& s : seeds) s.validate();
    check_disjoint(seeds, output);

    ThroughputReport rep;
    rep.n0 = rate.n0_per_s;
    rep.axis = output;
    rep.n1_omega.assign(output.count, 0.0);
    rep.n2_omega.assign(output.count, 0.0);
    rep.contributions.push_back({"spontaneous", {}, rep.n0, 0.0, {}});
    if (seeds.empty()) {
        rep.case_name = to_string(src.pump.kind) + "-pump/unseeded";
        rep.flux_scale = rep.n0;
        return rep;
    }
    rep.case_name = case_name(src.pump, seeds.front().kind);
    const double scale = flux_scale(rate, src.pump, seeds.front());
    rep.flux_scale = scale;

    std::vector<double> beta2(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) beta2[i] = seed_photon_number(seeds[i], src.pump);

    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const auto t = theta_single(src, rate, seeds[i], output, st);
        append_warnings(rep.warnings, t, "single " + seed_label(i));
        const double k = 2.0 * scale * beta2[i];
        rep.contributions.push_back({"single " + seed_label(i), {i}, k * t.value, t.value, scaled(t.spectrum, k)});
        rep.n1 += k * t.value;
        add_scaled(rep.n1_omega, t.spectrum, k);
    }
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const auto t = theta_double(src, rate, seeds[i], seeds[i], output, st);
        append_warnings(rep.warnings, t, "self " + seed_label(i));
        const double k = 0.5 * scale * beta2[i] * beta2[i];
        rep.contributions.push_back({"self " + seed_label(i), {i, i}, k * t.value, t.value, scaled(t.spectrum, k)});
        rep.n2 += k * t.value;
        add_scaled(rep.n2_omega, t.spectrum, k);
    }
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        for (std::size_t j = i + 1; j < seeds.size(); ++j) {
            const auto t = theta_double(src, rate, seeds[i], seeds[j], output, st);
            const std::string label = "cross " + seed_label(i) + "-" + seed_label(j);
            append_warnings(rep.warnings, t, label);
            const double k = 2.0 * scale * beta2[i] * beta2[j];
            rep.contributions.push_back({label, {i, j}, k * t.value, t.value, scaled(t.spectrum, k)});
            rep.n2 += k * t.value;
            add_scaled(rep.n2_omega, t.spectrum, k);
        }
    }
    return rep;
}

std::vector<ScanRow> seed_scan(const jsa::Source& src, const jsa::SpontaneousRate& rate, const SeedSpec& tmpl,
                               const std::vector<double>& lambdas_m, const jsa::FrequencyAxis& output,
                               const jsa::IntegrationSettings& st) {
    if (lambdas_m.empty()) throw ValidationError("seed scan needs at least one wavelength");
    const double scale = flux_scale(rate, src.pump, tmpl);
    const ThetaOptions opt{false, true};
    std::vector<ScanRow> rows;
    rows.reserve(lambdas_m.size());
    for (double lam : lambdas_m) {
        if (!(lam > 0.0)) throw ValidationError("scan wavelengths must be > 0");
        SeedSpec s = tmpl;
        s.omega = constants::omega_from_lambda(lam);
        const double b2 = seed_photon_number(s, src.pump);
        const auto t1 = theta_single(src, rate, s, output, st, opt);
        const auto t2 = theta_double(src, rate, s, s, output, st, opt);
        rows.push_back({lam, 2.0 * scale * b2 * t1.value, 0.5 * scale * b2 * b2 * t2.value});
    }
    return rows;
}

std::vector<double> double_seed_map(const jsa::Source& src, const jsa::SpontaneousRate& rate, const SeedSpec& tmpl,
                                    const std::vector<double>& lambdas_i, const std::vector<double>& lambdas_j,
                                    const jsa::FrequencyAxis& output, const jsa::IntegrationSettings& st) {
    if (lambdas_i.empty() || lambdas_j.empty()) throw ValidationError("double-seed map needs non-empty seed grids");
    const double scale = flux_scale(rate, src.pump, tmpl);
    const ThetaOptions opt{false, true};
    std::vector<double> out(lambdas_i.size() * lambdas_j.size());
    for (std::size_t i = 0; i < lambdas_i.size(); ++i) {
        SeedSpec a = tmpl;
        a.omega = constants::omega_from_lambda(lambdas_i[i]);
        const double ba = seed_photon_number(a, src.pump);
        for (std::size_t j = 0; j < lambdas_j.size(); ++j) {
            SeedSpec b = tmpl;
            b.omega = constants::omega_from_lambda(lambdas_j[j]);
            const double bb = seed_photon_number(b, src.pump);
            const auto t = theta_double(src, rate, a, b, output, st, opt);
            out[i * lambdas_j.size() + j] = 0.5 * scale * ba * bb * t.value;
        }
    }
    return out;
}

}  // namespace tripletforge::seeding
