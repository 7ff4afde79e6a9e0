#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tripletforge/seeding.hpp"
#include "tripletforge/tomography.hpp"

namespace tripletforge::config {

struct FiberConfig {
    dispersion::FiberSpec spec;
    double chi3 = 2.5e-22;  // m^2/V^2
    // When set, the radius is re-solved near spec.radius_m so that the degenerate
    // point of this pump wavelength is phase matched.
    std::optional<double> design_lambda_m;
    double radius_search = 0.02;  // fractional search half-width
};

struct ScanConfig {
    double lambda_min_m = 0.0;
    double lambda_max_m = 0.0;
    std::size_t points = 0;
    std::size_t map_points = 0;           // 2-D double-seed map per axis, 0 disables
    std::vector<double> spectra_lambda_m;  // single-seed spectra to emit
};

struct TablePoint {
    std::string label;
    double lambda_p_m = 0.0;
    std::vector<double> seeds_m;  // one or two
};

struct TableConfig {
    std::vector<TablePoint> points;
    double seed_power_w = 10e-3;
    std::vector<std::pair<SpectralKind, SpectralKind>> combinations;  // (pump, seed)
};

struct SetConfig {
    double lambda_min_m = 0.0;
    double lambda_max_m = 0.0;
    std::size_t points = 0;
    double power_i_w = 10e-3;
    double power_j_w = 10e-3;
    double linewidth_hz = 1e6;
    bool skip_diagonal = true;
    std::size_t truth_subsamples = 4;
};

struct RunConfig {
    FiberConfig fiber;
    dispersion::ModeLabel triplet_mode{"HE", 1, 1};
    jsa::PumpSpec pump;  // carries the pump mode
    std::optional<jsa::SpectralWindow> window;
    std::vector<seeding::SeedSpec> seeds;
    std::size_t jsi_points = 64;
    std::size_t output_points = 1024;
    std::size_t curve_points = 2048;
    jsa::IntegrationSettings integration;
    std::optional<ScanConfig> scan;
    std::optional<TableConfig> table;
    std::optional<SetConfig> set;
    std::string out_dir = "out";
    bool svg = true;

    nlohmann::json raw;
    std::string hash;  // FNV-1a of the canonical JSON

    void validate() const;
};

RunConfig parse_config(const nlohmann::json& j);
// One seed object; defaults (sigma_p / 10, the pump repetition rate) come from pump.
seeding::SeedSpec parse_seed(const nlohmann::json& s, const jsa::PumpSpec& pump, const std::string& path = "seed");
// Fiber with the radius re-solved for the design wavelength when one is given.
dispersion::FiberSpec resolved_fiber(const RunConfig& cfg);
RunConfig load_config(const std::string& path);

// Configuration of the reference study: HE12 pump, HE11 triplets, 0.395 um
// fused-silica strand, 1 cm, 200 mW, 10 MHz, sigma_p = 4.7 rad/ps.
nlohmann::json default_config_json();

std::uint64_t fnv1a(const std::string& s);
std::string hex64(std::uint64_t h);

}  // namespace tripletforge::config
