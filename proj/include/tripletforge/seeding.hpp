#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tripletforge/jsa.hpp"

namespace tripletforge::seeding {

struct SeedSpec {
    SpectralKind kind = SpectralKind::Monochromatic;
    double omega = 0.0;         // central frequency, rad/s
    double sigma = 0.0;         // rad/s, pulsed only
    double power_w = 0.0;       // average power
    double delay_s = 0.0;       // pulsed only
    double rep_rate_hz = 0.0;   // pulsed only
    double linewidth_hz = 1e6;  // cw only, used to form the k-number bandwidth

    void validate() const;
    bool pulsed() const { return kind == SpectralKind::Pulsed; }
};

// Photon-number conventions; every report records them.
struct Conventions {
    std::string pulsed_seed = "|beta0|^2 = P_seed / (R hbar omega_s) photons per pulse";
    std::string cw_seed = "|beta0|^2 = P_seed / (hbar omega_s) photons per second, for either pump kind";
    std::string cw_pump_pulsed_seed = "|alpha_p|^2 = P_pump tau_s / (hbar omega_0), tau_s = 2 / sigma_s";
    std::string rate_units = "per-pulse quantities are multiplied by R whenever pump or seed is pulsed";
    std::string cw_double_seed = "cw pump and cw seeds: doubly-seeded output evaluated at omega_1 = omega_0 - omega_A - omega_B";
    std::string seed_band = "single-seed spectra and totals exclude +-3 sigma_s (pulsed) or +-2 output cells (cw) around the seed";
};

double seed_photon_number(const SeedSpec& seed, const jsa::PumpSpec& pump);
double pump_photons_per_seed(const jsa::PumpSpec& pump, const SeedSpec& seed);

std::string case_name(const jsa::PumpSpec& pump, SpectralKind seed_kind);

struct ThetaResult {
    std::string case_name;
    double value = 0.0;          // Theta
    double unnormalized = 0.0;   // |c3|^2 Theta
    std::vector<double> spectrum;  // dTheta/domega_1 on the output axis
    std::optional<numerics::Interval> excluded;
    numerics::ConvergenceReport report;
    std::vector<std::string> warnings;
};

struct ThetaOptions {
    bool spectrum = true;
    bool exclude_seed_band = true;
};

ThetaResult theta_single(const jsa::Source& src, const jsa::SpontaneousRate& rate, const SeedSpec& seed,
                         const jsa::FrequencyAxis& output, const jsa::IntegrationSettings& st = {},
                         const ThetaOptions& opt = {});

ThetaResult theta_double(const jsa::Source& src, const jsa::SpontaneousRate& rate, const SeedSpec& a,
                         const SeedSpec& b, const jsa::FrequencyAxis& output, const jsa::IntegrationSettings& st = {},
                         const ThetaOptions& opt = {});

jsa::FrequencyAxis output_axis(const jsa::SpectralWindow& w, std::size_t count);

// Converts a density per rad/s on the output axis to a density per metre of
// wavelength, ordered by ascending wavelength.
struct LambdaSpectrum {
    std::vector<double> lambda_m;
    std::vector<double> density;  // per metre
};
LambdaSpectrum to_lambda(const jsa::FrequencyAxis& axis, const std::vector<double>& per_omega);
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

struct Contribution {
    std::string label;
    std::vector<std::size_t> seeds;
    double flux = 0.0;  // photons/s
    double theta = 0.0;
    std::vector<double> spectrum_omega;  // photons/s per rad/s
};

struct ThroughputReport {
    double n0 = 0.0;
    double n1 = 0.0;
    double n2 = 0.0;
    jsa::FrequencyAxis axis;
    std::vector<double> n1_omega, n2_omega;  // per rad/s
    std::vector<Contribution> contributions;
    std::vector<std::string> warnings;
    Conventions conventions;
    std::string case_name;
    double flux_scale = 0.0;
};

ThroughputReport throughput(const jsa::Source& src, const jsa::SpontaneousRate& rate,
                            const std::vector<SeedSpec>& seeds, const jsa::FrequencyAxis& output,
                            const jsa::IntegrationSettings& st = {});

// Seeds must be pairwise separated by more than 3 (sigma_i + sigma_j).
void check_disjoint(const std::vector<SeedSpec>& seeds, const jsa::FrequencyAxis& output);

struct ScanRow {
    double lambda_seed_m = 0.0;
    double n1 = 0.0;
    double n2_degenerate = 0.0;
};

std::vector<ScanRow> seed_scan(const jsa::Source& src, const jsa::SpontaneousRate& rate, const SeedSpec& tmpl,
                               const std::vector<double>& lambdas_m, const jsa::FrequencyAxis& output,
                               const jsa::IntegrationSettings& st = {});

// N2 for seed pair (lambda_i, lambda_j), using the degenerate coefficient
// (N0/2) |beta|^4 so that the diagonal equals the degenerate scan.
std::vector<double> double_seed_map(const jsa::Source& src, const jsa::SpontaneousRate& rate, const SeedSpec& tmpl,
                                    const std::vector<double>& lambdas_i, const std::vector<double>& lambdas_j,
                                    const jsa::FrequencyAxis& output, const jsa::IntegrationSettings& st = {});

// Flux multiplier N0 x (R for a cw pump with pulsed seeds).
double flux_scale(const jsa::SpontaneousRate& rate, const jsa::PumpSpec& pump, const SeedSpec& seed);

}  // namespace tripletforge::seeding
