#include "tripletforge/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "tripletforge/constants.hpp"
#include "tripletforge/errors.hpp"

namespace tripletforge::config {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& path) {
    if (!j.is_object()) throw ValidationError(path + ": expected an object");
    for (const auto& [k, v] : j.items()) {
        if (!allowed.count(k)) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            throw ValidationError("unknown key '" + path + "." + k + "' (allowed: " + list + ")");
        }
    }
}

double num(const json& j, const char* key, double def, const std::string& path) {
    if (!j.contains(key)) return def;
    const auto& v = j.at(key);
    if (!v.is_number()) throw ValidationError(path + "." + key + ": expected a number");
    return v.get<double>();
}

std::size_t count(const json& j, const char* key, std::size_t def, const std::string& path) {
    if (!j.contains(key)) return def;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ValidationError(path + "." + key + ": expected a nonnegative integer");
    return v.get<std::size_t>();
}

std::string str(const json& j, const char* key, const std::string& def, const std::string& path) {
    if (!j.contains(key)) return def;
    const auto& v = j.at(key);
    if (!v.is_string()) throw ValidationError(path + "." + key + ": expected a string");
    return v.get<std::string>();
}

bool flag(const json& j, const char* key, bool def, const std::string& path) {
    if (!j.contains(key)) return def;
    const auto& v = j.at(key);
    if (!v.is_boolean()) throw ValidationError(path + "." + key + ": expected true or false");
    return v.get<bool>();
}

std::vector<double> num_list(const json& j, const char* key, const std::string& path) {
    std::vector<double> out;
    if (!j.contains(key)) return out;
    const auto& v = j.at(key);
    if (!v.is_array()) throw ValidationError(path + "." + key + ": expected an array of numbers");
    for (const auto& e : v) {
        if (!e.is_number()) throw ValidationError(path + "." + key + ": expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

const json& sub(const json& j, const char* key) {
    static const json empty = json::object();
    return j.contains(key) ? j.at(key) : empty;
}

SpectralKind kind_of(const std::string& s, const std::string& path) {
    try {
        return spectral_kind_from_string(s);
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

dispersion::ModeLabel mode_of(const std::string& s, const std::string& path) {
    try {
        return dispersion::ModeLabel::parse(s);
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

double nm(double v) { return v * 1e-9; }

}  // namespace

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json default_config_json() {
    return json::parse(R"({
        "fiber": {"radius_um": 0.395, "length_cm": 1.0, "cladding_index": 1.0, "chi3_m2_per_V2": 2.5e-22,
                  "design_lambda_nm": 532.0},
        "modes": {"pump": "HE12", "triplet": "HE11"},
        "pump": {"kind": "pulsed", "lambda_nm": 532.0, "sigma_rad_per_ps": 4.7, "power_mW": 200.0,
                 "rep_rate_MHz": 10.0}
    })");
}

seeding::SeedSpec parse_seed(const json& s, const jsa::PumpSpec& pump, const std::string& path) {
    check_keys(s, {"kind", "lambda_nm", "sigma_rad_per_ps", "power_mW", "delay_fs", "rep_rate_MHz", "linewidth_MHz"},
               path);
    if (!s.contains("lambda_nm")) throw ValidationError(path + ": lambda_nm is required");
    seeding::SeedSpec sd;
    sd.kind = kind_of(str(s, "kind", "cw", path), path + ".kind");
    const double ls = nm(num(s, "lambda_nm", 0.0, path));
    if (!(ls > 0.0)) throw ValidationError(path + ".lambda_nm must be > 0");
    sd.omega = constants::omega_from_lambda(ls);
    sd.sigma = num(s, "sigma_rad_per_ps", pump.sigma * 1e-12 / 10.0, path) * 1e12;
    sd.power_w = num(s, "power_mW", 10.0, path) * 1e-3;
    sd.delay_s = num(s, "delay_fs", 0.0, path) * 1e-15;
    sd.rep_rate_hz = num(s, "rep_rate_MHz", pump.rep_rate_hz * 1e-6, path) * 1e6;
    sd.linewidth_hz = num(s, "linewidth_MHz", 1.0, path) * 1e6;
    return sd;
}

dispersion::FiberSpec resolved_fiber(const RunConfig& cfg) {
    auto f = cfg.fiber.spec;
    if (cfg.fiber.design_lambda_m) {
        const double r = f.radius_m, s = cfg.fiber.radius_search;
        f.radius_m = dispersion::phase_matched_radius(f, cfg.pump.mode, cfg.triplet_mode,
                                                      constants::omega_from_lambda(*cfg.fiber.design_lambda_m),
                                                      r * (1.0 - s), r * (1.0 + s));
    }
    return f;
}

RunConfig parse_config(const json& j) {
    check_keys(j, {"fiber", "modes", "pump", "window", "seeds", "grid", "quadrature", "scan", "table", "set", "output"},
               "config");
    RunConfig c;
    c.raw = j;
    c.hash = hex64(fnv1a(j.dump()));

    const json& f = sub(j, "fiber");
    check_keys(f, {"radius_um", "length_cm", "cladding_index", "chi3_m2_per_V2", "design_lambda_nm",
                   "radius_search_fraction", "material"},
               "fiber");
    c.fiber.spec.radius_m = num(f, "radius_um", 0.395, "fiber") * 1e-6;
    c.fiber.spec.length_m = num(f, "length_cm", 1.0, "fiber") * 1e-2;
    c.fiber.spec.cladding_n = num(f, "cladding_index", 1.0, "fiber");
    c.fiber.chi3 = num(f, "chi3_m2_per_V2", 2.5e-22, "fiber");
    if (f.contains("design_lambda_nm")) c.fiber.design_lambda_m = nm(num(f, "design_lambda_nm", 0.0, "fiber"));
    c.fiber.radius_search = num(f, "radius_search_fraction", 0.02, "fiber");
    if (f.contains("material")) {
        const json& m = f.at("material");
        check_keys(m, {"law", "name", "coefficients", "index", "lambda_min_um", "lambda_max_um"}, "fiber.material");
        const std::string law = str(m, "law", "sellmeier", "fiber.material");
        dispersion::MaterialIndex mi;
        if (law == "sellmeier") {
            mi = dispersion::MaterialIndex::fused_silica();
            if (m.contains("coefficients")) mi.coefficients = num_list(m, "coefficients", "fiber.material");
        } else if (law == "constant") {
            mi = dispersion::MaterialIndex::constant(num(m, "index", 1.45, "fiber.material"));
        } else {
            throw ValidationError("fiber.material.law: unknown law '" + law + "' (expected sellmeier or constant)");
        }
        mi.name = str(m, "name", mi.name, "fiber.material");
        mi.lambda_min_m = num(m, "lambda_min_um", mi.lambda_min_m * 1e6, "fiber.material") * 1e-6;
        mi.lambda_max_m = num(m, "lambda_max_um", mi.lambda_max_m * 1e6, "fiber.material") * 1e-6;
        c.fiber.spec.core = mi;
    }

    const json& md = sub(j, "modes");
    check_keys(md, {"pump", "triplet"}, "modes");
    c.pump.mode = mode_of(str(md, "pump", "HE12", "modes"), "modes.pump");
    c.triplet_mode = mode_of(str(md, "triplet", "HE11", "modes"), "modes.triplet");

    const json& p = sub(j, "pump");
    check_keys(p, {"kind", "lambda_nm", "sigma_rad_per_ps", "power_mW", "rep_rate_MHz"}, "pump");
    c.pump.kind = kind_of(str(p, "kind", "pulsed", "pump"), "pump.kind");
    const double lp = nm(num(p, "lambda_nm", 532.0, "pump"));
    if (!(lp > 0.0)) throw ValidationError("pump.lambda_nm must be > 0");
    c.pump.omega0 = constants::omega_from_lambda(lp);
    c.pump.sigma = num(p, "sigma_rad_per_ps", 4.7, "pump") * 1e12;
    c.pump.power_w = num(p, "power_mW", 200.0, "pump") * 1e-3;
    c.pump.rep_rate_hz = num(p, "rep_rate_MHz", 10.0, "pump") * 1e6;

    if (j.contains("window")) {
        const json& w = j.at("window");
        check_keys(w, {"lambda_min_nm", "lambda_max_nm"}, "window");
        if (!w.contains("lambda_min_nm") || !w.contains("lambda_max_nm"))
            throw ValidationError("window needs lambda_min_nm and lambda_max_nm");
        const double lo = nm(num(w, "lambda_min_nm", 0.0, "window"));
        const double hi = nm(num(w, "lambda_max_nm", 0.0, "window"));
        if (!(lo > 0.0) || !(hi > lo)) throw ValidationError("window needs 0 < lambda_min_nm < lambda_max_nm");
        c.window = jsa::SpectralWindow{constants::omega_from_lambda(hi), constants::omega_from_lambda(lo)};
    }

    if (j.contains("seeds")) {
        const json& ss = j.at("seeds");
        if (!ss.is_array()) throw ValidationError("seeds: expected an array");
        for (std::size_t i = 0; i < ss.size(); ++i) {
            const std::string path = "seeds[" + std::to_string(i) + "]";
            c.seeds.push_back(parse_seed(ss[i], c.pump, path));
        }
    }

    const json& g = sub(j, "grid");
    check_keys(g, {"jsi_points", "output_points", "curve_points"}, "grid");
    c.jsi_points = count(g, "jsi_points", 64, "grid");
    c.output_points = count(g, "output_points", 1024, "grid");
    c.curve_points = count(g, "curve_points", 2048, "grid");

    const json& q = sub(j, "quadrature");
    check_keys(q, {"rule", "rel_tol", "max_refinements", "smooth_nodes", "sharp_nodes", "seed_nodes"}, "quadrature");
    c.integration.rule = numerics::rule_from_string(str(q, "rule", "gauss-legendre", "quadrature"));
    c.integration.rel_tol = num(q, "rel_tol", 1e-3, "quadrature");
    c.integration.max_refinements = static_cast<int>(count(q, "max_refinements", 3, "quadrature"));
    c.integration.smooth_nodes = count(q, "smooth_nodes", 64, "quadrature");
    c.integration.sharp_nodes = count(q, "sharp_nodes", 512, "quadrature");
    c.integration.seed_nodes = count(q, "seed_nodes", 48, "quadrature");

    if (j.contains("scan")) {
        const json& s = j.at("scan");
        check_keys(s, {"lambda_min_nm", "lambda_max_nm", "points", "map_points", "spectra_lambda_nm"}, "scan");
        ScanConfig sc;
        sc.lambda_min_m = nm(num(s, "lambda_min_nm", 1450.0, "scan"));
        sc.lambda_max_m = nm(num(s, "lambda_max_nm", 1750.0, "scan"));
        sc.points = count(s, "points", 121, "scan");
        sc.map_points = count(s, "map_points", 0, "scan");
        for (double l : num_list(s, "spectra_lambda_nm", "scan")) sc.spectra_lambda_m.push_back(nm(l));
        c.scan = sc;
    }

    if (j.contains("table")) {
        const json& t = j.at("table");
        check_keys(t, {"points", "combinations", "seed_power_mW"}, "table");
        TableConfig tc;
        tc.seed_power_w = num(t, "seed_power_mW", 10.0, "table") * 1e-3;
        if (t.contains("points")) {
            if (!t.at("points").is_array()) throw ValidationError("table.points: expected an array");
            for (std::size_t i = 0; i < t.at("points").size(); ++i) {
                const std::string path = "table.points[" + std::to_string(i) + "]";
                const json& pt = t.at("points")[i];
                check_keys(pt, {"label", "lambda_p_nm", "seeds_nm"}, path);
                TablePoint tp;
                tp.label = str(pt, "label", std::string(1, static_cast<char>('A' + i % 26)), path);
                tp.lambda_p_m = nm(num(pt, "lambda_p_nm", 532.0, path));
                for (double l : num_list(pt, "seeds_nm", path)) tp.seeds_m.push_back(nm(l));
                tc.points.push_back(tp);
            }
        }
        std::vector<std::string> combos{"pulsed-pulsed", "cw-cw", "pulsed-cw", "cw-pulsed"};
        if (t.contains("combinations")) {
            combos.clear();
            if (!t.at("combinations").is_array()) throw ValidationError("table.combinations: expected an array");
            for (const auto& e : t.at("combinations")) {
                if (!e.is_string()) throw ValidationError("table.combinations: expected strings like pulsed-cw");
                combos.push_back(e.get<std::string>());
            }
        }
        for (const auto& s : combos) {
            const auto dash = s.find('-');
            if (dash == std::string::npos)
                throw ValidationError("table.combinations: '" + s + "' is not of the form <pump>-<seed>");
            tc.combinations.emplace_back(kind_of(s.substr(0, dash), "table.combinations"),
                                         kind_of(s.substr(dash + 1), "table.combinations"));
        }
        c.table = tc;
    }

    if (j.contains("set")) {
        const json& s = j.at("set");
        check_keys(s, {"lambda_min_nm", "lambda_max_nm", "points", "power_i_mW", "power_j_mW", "linewidth_MHz",
                       "skip_diagonal", "truth_subsamples"},
                   "set");
        SetConfig sc;
        if (!s.contains("lambda_min_nm") || !s.contains("lambda_max_nm") || !s.contains("points"))
            throw ValidationError("set needs seed grids: lambda_min_nm, lambda_max_nm and points");
        sc.lambda_min_m = nm(num(s, "lambda_min_nm", 0.0, "set"));
        sc.lambda_max_m = nm(num(s, "lambda_max_nm", 0.0, "set"));
        sc.points = count(s, "points", 0, "set");
        sc.power_i_w = num(s, "power_i_mW", 10.0, "set") * 1e-3;
        sc.power_j_w = num(s, "power_j_mW", 10.0, "set") * 1e-3;
        sc.linewidth_hz = num(s, "linewidth_MHz", 1.0, "set") * 1e6;
        sc.skip_diagonal = flag(s, "skip_diagonal", true, "set");
        sc.truth_subsamples = count(s, "truth_subsamples", 4, "set");
        c.set = sc;
    }

    const json& o = sub(j, "output");
    check_keys(o, {"dir", "svg"}, "output");
    c.out_dir = str(o, "dir", "out", "output");
    c.svg = flag(o, "svg", true, "output");

    c.validate();
    return c;
}

void RunConfig::validate() const {
    fiber.spec.validate();
    if (!(fiber.chi3 > 0.0)) throw ValidationError("fiber.chi3_m2_per_V2 must be > 0");
    if (fiber.design_lambda_m && !(*fiber.design_lambda_m > 0.0))
        throw ValidationError("fiber.design_lambda_nm must be > 0");
    if (!(fiber.radius_search > 0.0 && fiber.radius_search < 0.5))
        throw ValidationError("fiber.radius_search_fraction must lie in (0, 0.5)");
    pump.validate();
    auto in_material = [&](double omega, const std::string& what) {
        const double l = constants::lambda_from_omega(omega);
        if (l < fiber.spec.core.lambda_min_m || l > fiber.spec.core.lambda_max_m) {
            std::ostringstream os;
            os << what << " at " << l * 1e9 << " nm lies outside the material window ["
               << fiber.spec.core.lambda_min_m * 1e9 << ", " << fiber.spec.core.lambda_max_m * 1e9 << "] nm";
            throw ValidationError(os.str());
        }
    };
    in_material(pump.omega0, "pump");
    if (window) {
        in_material(window->omega_min, "window edge");
        in_material(window->omega_max, "window edge");
        const double wc = pump.omega0 / 3.0;
        if (!window->contains(wc)) throw ValidationError("window must contain the degenerate point lambda_p * 3");
    }
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        seeds[i].validate();
        if (seeds[i].kind != seeds.front().kind)
            throw ValidationError("seeds mix pulsed and cw kinds; mixed seed sets are not supported");
    }
    if (jsi_points < 2) throw ValidationError("grid.jsi_points must be >= 2");
    if (output_points < 8) throw ValidationError("grid.output_points must be >= 8");
    if (curve_points < 16) throw ValidationError("grid.curve_points must be >= 16");
    integration.validate();
    if (scan) {
        if (!(scan->lambda_min_m > 0.0) || !(scan->lambda_max_m > scan->lambda_min_m))
            throw ValidationError("scan needs 0 < lambda_min_nm < lambda_max_nm");
        if (scan->points < 2) throw ValidationError("scan.points must be >= 2");
        if (scan->map_points == 1) throw ValidationError("scan.map_points must be 0 or >= 2");
    }
    if (table) {
        if (table->points.empty()) throw ValidationError("table.points is empty; give at least one point");
        if (table->combinations.empty()) throw ValidationError("table.combinations is empty");
        if (!(table->seed_power_w >= 0.0)) throw ValidationError("table.seed_power_mW must be >= 0");
        for (const auto& p : table->points) {
            if (!(p.lambda_p_m > 0.0)) throw ValidationError("table point " + p.label + ": lambda_p_nm must be > 0");
            if (p.seeds_m.empty() || p.seeds_m.size() > 2)
                throw ValidationError("table point " + p.label + ": seeds_nm needs one or two wavelengths");
            for (double l : p.seeds_m)
                if (!(l > 0.0)) throw ValidationError("table point " + p.label + ": seed wavelengths must be > 0");
        }
    }
    if (set) {
        if (!(set->lambda_min_m > 0.0) || !(set->lambda_max_m > set->lambda_min_m))
            throw ValidationError("set needs 0 < lambda_min_nm < lambda_max_nm");
        if (set->points < 2) throw ValidationError("set.points must be >= 2");
        if (!(set->power_i_w >= 0.0) || !(set->power_j_w >= 0.0)) throw ValidationError("set seed powers must be >= 0");
        if (!(set->linewidth_hz > 0.0)) throw ValidationError("set.linewidth_MHz must be > 0");
        if (set->truth_subsamples < 1) throw ValidationError("set.truth_subsamples must be >= 1");
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

}  // namespace tripletforge::config
