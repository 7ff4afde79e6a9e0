#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tripletforge/seeding.hpp"

namespace tripletforge::tomography {

// Two narrow cw seeds rastered over (lambda_i, lambda_j) with a pulsed pump.
struct SetScanConfig {
    std::vector<double> lambda_i_m;
    std::vector<double> lambda_j_m;
    double power_i_w = 10e-3;
    double power_j_w = 10e-3;
    double linewidth_hz = 1e6;  // seed optical bandwidth, mapped to a k-number bandwidth
    jsa::FrequencyAxis output;
    bool skip_diagonal = true;  // drop points within one raster cell of lambda_i == lambda_j

    void validate() const;
};

// delta_k = 2 pi delta_nu dk/domega at omega.
double delta_k_from_linewidth(const dispersion::ModeCurve& curve, double omega, double linewidth_hz);

struct RasterPoint {
    std::size_t i = 0, j = 0;
    double omega_i = 0.0, omega_j = 0.0;
    bool skipped = false;
    std::string note;
    double beta2_i = 0.0, beta2_j = 0.0;
    double dk_i = 0.0, dk_j = 0.0;
    std::vector<double> spectrum;  // N2^{ij}(k1), photons per unit k1, on the output nodes
    double cross_flux = 0.0;       // seeded cross term, integrated over omega_1
    double single_flux = 0.0;      // competing single-seed flux of both seeds
    double self_flux = 0.0;        // competing self double-seed flux of both seeds
    // Cross-term spectral density over the competing densities, at the cross-term peak.
    double single_ratio = 0.0;
    double self_ratio = 0.0;
};

struct SetRaster {
    SetScanConfig scan;
    double n0 = 0.0;
    std::vector<RasterPoint> points;  // i-major
    std::vector<double> k1_weights;   // trapezoid weights in k1 on the output nodes
    std::vector<std::string> notes;

    const RasterPoint& at(std::size_t i, std::size_t j) const { return points[i * scan.lambda_j_m.size() + j]; }
};

SetRaster simulate_set_scan(const jsa::Source& src, const jsa::SpontaneousRate& rate, const SetScanConfig& scan,
                            const jsa::IntegrationSettings& st = {});

// Forward-model ground truth (N0/2) |phi(k1, k_i, k_j)|^2.
double truth_density(const jsa::Source& src, const jsa::SpontaneousRate& rate, double w1, double wi, double wj);

struct SetReconstruction {
    std::size_t ni = 0, nj = 0, nk = 0;
    std::vector<double> values;  // (N0/2)|phi|^2, index (i * nj + j) * nk + k
    std::vector<bool> defined;   // per raster point
    std::vector<double> marginal;  // integral over k1, per raster point; NaN where undefined
    std::vector<std::string> notes;
    // Minimum single_ratio over points whose cross flux exceeds 1% of the raster maximum.
    double min_contamination_ratio = 0.0;
};

SetReconstruction reconstruct_jsi(const SetRaster& raster);

// Integral over k1 of a map laid out like SetReconstruction::values.
std::vector<double> k1_marginal(const SetRaster& raster, const std::vector<double>& values);

// Truth on the raster nodes, NaN where the raster point is skipped.
std::vector<double> truth_on_raster(const jsa::Source& src, const jsa::SpontaneousRate& rate, const SetRaster& raster);

// Truth averaged over each raster cell in (omega_i, omega_j) with sub x sub samples.
std::vector<double> cell_averaged_truth(const jsa::Source& src, const jsa::SpontaneousRate& rate,
                                        const SetRaster& raster, std::size_t sub);

// Bhattacharyya overlap sum sqrt(p q) / sqrt(sum p sum q); entries that are NaN in
// either map are ignored.
double fidelity(const std::vector<double>& p, const std::vector<double>& q);

// Integral of the reconstruction over k1, k_i, k_j; equals N0/2 when the raster covers the support.
double integrate_reconstruction(const jsa::Source& src, const SetRaster& raster, const SetReconstruction& rec);

}  // namespace tripletforge::tomography
