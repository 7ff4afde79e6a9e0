#pragma once
// Real-fiber sources shared across test files; built once per process.

#include <map>
#include <string>

#include "tripletforge/config.hpp"
#include "tripletforge/constants.hpp"

namespace fixtures {

inline nlohmann::json base_config(double lambda_p_nm, const std::string& pump_kind) {
    auto j = tripletforge::config::default_config_json();
    j["pump"]["lambda_nm"] = lambda_p_nm;
    j["pump"]["kind"] = pump_kind;
    if (pump_kind == "cw") {
        j["pump"].erase("sigma_rad_per_ps");
        j["pump"].erase("rep_rate_MHz");
    }
    j["grid"] = {{"curve_points", 1024}, {"output_points", 512}, {"jsi_points", 32}};
    return j;
}

struct Built {
    tripletforge::config::RunConfig cfg;
    tripletforge::jsa::Source src;
    tripletforge::jsa::SpontaneousRate rate;
};

// Degenerate design; the pump wavelength moves but the radius stays at its 532 nm value.
inline const Built& source(double lambda_p_nm, const std::string& pump_kind) {
    static std::map<std::pair<double, std::string>, Built> cache;
    const auto key = std::make_pair(lambda_p_nm, pump_kind);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    Built b{tripletforge::config::parse_config(base_config(lambda_p_nm, pump_kind)), {}, {}};
    tripletforge::jsa::SourceOptions so;
    so.curve_points = b.cfg.curve_points;
    b.src = tripletforge::jsa::build_source(tripletforge::config::resolved_fiber(b.cfg), b.cfg.pump,
                                            b.cfg.triplet_mode, b.cfg.window, b.cfg.fiber.chi3, so);
    b.rate = tripletforge::jsa::spontaneous_rate(b.src, b.cfg.integration);
    return cache.emplace(key, std::move(b)).first->second;
}

inline double nm_to_omega(double nm) { return tripletforge::constants::omega_from_lambda(nm * 1e-9); }

}  // namespace fixtures
