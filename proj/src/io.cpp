#include "tripletforge/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tripletforge/config.hpp"
#include "tripletforge/constants.hpp"
#include "tripletforge/errors.hpp"

namespace tripletforge::io {

using nlohmann::json;

void Logger::info(const std::string& msg) {
    lines_.push_back("info: " + msg);
    if (echo_) std::cerr << "tripletforge: " << msg << "\n";
}

void Logger::warn(const std::string& msg) {
    lines_.push_back("warning: " + msg);
    if (echo_) std::cerr << "tripletforge: warning: " << msg << "\n";
}

std::vector<std::string> Logger::warnings() const {
    std::vector<std::string> out;
    for (const auto& l : lines_)
        if (l.rfind("warning: ", 0) == 0) out.push_back(l.substr(9));
    return out;
}

void Logger::write(const fs::path& path) const {
    std::ofstream o(path);
    if (!o) throw IoError("cannot write " + path.string());
    for (const auto& l : lines_) o << l << "\n";
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.8e", v);
    return buf;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

namespace {

std::ofstream open_out(const fs::path& path, bool binary = false) {
    if (path.has_parent_path()) ensure_dir(path.parent_path());
    std::ofstream o(path, binary ? std::ios::binary : std::ios::out);
    if (!o) throw IoError("cannot write " + path.string());
    return o;
}

void write_row(std::ostream& o, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) o << (i ? "," : "") << cells[i];
    o << "\n";
}

}  // namespace

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size()) throw ValidationError("csv header and column count differ");
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != n) throw ValidationError("csv columns have unequal length");
    auto o = open_out(path);
    write_row(o, header);
    std::vector<std::string> cells(columns.size());
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) cells[c] = fmt(columns[c][r]);
        write_row(o, cells);
    }
    if (!o) throw IoError("write failed: " + path.string());
}

void write_csv_rows(const fs::path& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
    auto o = open_out(path);
    write_row(o, header);
    for (const auto& r : rows) {
        if (r.size() != header.size()) throw ValidationError("csv row width differs from header");
        write_row(o, r);
    }
    if (!o) throw IoError("write failed: " + path.string());
}

Csv read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    Csv out;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    if (std::getline(in, line)) out.header = split(line);
    while (std::getline(in, line))
        if (!line.empty()) out.rows.push_back(split(line));
    return out;
}

void write_json(const fs::path& path, const json& j) {
    auto o = open_out(path);
    o << j.dump(2) << "\n";
    if (!o) throw IoError("write failed: " + path.string());
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError(path.string() + " is not valid JSON: " + e.what());
    }
}

void write_f64(const fs::path& path, const std::vector<double>& v) {
    auto o = open_out(path, true);
    static_assert(sizeof(double) == 8);
    if constexpr (std::endian::native == std::endian::little) {
        o.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
    } else {
        for (double d : v) {
            auto u = std::bit_cast<std::uint64_t>(d);
            char b[8];
            for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((u >> (8 * i)) & 0xff);
            o.write(b, 8);
        }
    }
    if (!o) throw IoError("write failed: " + path.string());
}

std::vector<double> read_f64(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() % 8) throw IoError(path.string() + " is not a float64 array");
    std::vector<double> out(bytes.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t u = 0;
        for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i * 8 + b])) << (8 * b);
        out[i] = std::bit_cast<double>(u);
    }
    return out;
}

json mode_curve_to_json(const dispersion::ModeCurve& c) {
    return {{"mode", c.label().str()},
            {"provenance", c.provenance() == dispersion::Provenance::Solved ? "solved" : "user-tabulated"},
            {"interpolation", "cubic"},
            {"omega_rad_per_s", c.omega()},
            {"n_eff", c.n_eff_samples()}};
}

dispersion::ModeCurve mode_curve_from_json(const json& j) {
    try {
        const auto label = dispersion::ModeLabel::parse(j.at("mode").get<std::string>());
        const auto prov = j.at("provenance").get<std::string>() == "solved" ? dispersion::Provenance::Solved
                                                                             : dispersion::Provenance::UserTabulated;
        return dispersion::ModeCurve(label, j.at("omega_rad_per_s").get<std::vector<double>>(),
                                     j.at("n_eff").get<std::vector<double>>(), prov);
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed mode curve: ") + e.what());
    }
}

json fiber_to_json(const dispersion::FiberSpec& f) {
    return {{"radius_m", f.radius_m},
            {"length_m", f.length_m},
            {"cladding_index", f.cladding_n},
            {"material",
             {{"name", f.core.name},
              {"law", f.core.law},
              {"coefficients", f.core.coefficients},
              {"lambda_min_m", f.core.lambda_min_m},
              {"lambda_max_m", f.core.lambda_max_m}}}};
}

DispersionCache::DispersionCache(fs::path dir, Logger* log) : dir_(std::move(dir)), log_(log) {}

std::string DispersionCache::key(const dispersion::FiberSpec& fiber, const dispersion::ModeLabel& label,
                                 const std::vector<double>& grid) const {
    json k = fiber_to_json(fiber);
    k.erase("length_m");  // does not enter the mode equation
    k["mode"] = label.str();
    k["grid"] = {grid.front(), grid.back(), grid.size()};
    return config::hex64(config::fnv1a(k.dump()));
}

dispersion::ModeCurve DispersionCache::get(const dispersion::FiberSpec& fiber, const dispersion::ModeLabel& label,
                                           const std::vector<double>& grid) {
    if (grid.size() < 2) throw ValidationError("mode grid needs at least two points");
    const auto k = key(fiber, label, grid);
    const auto p = path_for(k);
    if (fs::exists(p)) {
        try {
            auto c = mode_curve_from_json(read_json(p));
            if (c.label() == label && c.omega() == grid) {
                ++hits_;
                if (log_) log_->info("dispersion cache hit " + label.str() + " " + p.filename().string());
                return c;
            }
            if (log_) log_->warn("dispersion cache entry " + p.string() + " does not match its key; recomputing");
        } catch (const Error& e) {
            if (log_) log_->warn("corrupted dispersion cache entry " + p.string() + " (" + e.what() + "); recomputing");
        }
    }
    ++misses_;
    auto c = dispersion::solve_mode(fiber, label, grid);
    try {
        ensure_dir(dir_);
        write_json(p, mode_curve_to_json(c));
        if (log_) log_->info("dispersion cache store " + label.str() + " " + p.filename().string());
    } catch (const IoError& e) {
        if (log_) log_->warn(std::string("could not store dispersion cache entry: ") + e.what());
    }
    return c;
}

jsa::CurveProvider DispersionCache::provider() {
    return [this](const dispersion::FiberSpec& f, const dispersion::ModeLabel& l, const std::vector<double>& g) {
        return get(f, l, g);
    };
}

fs::path resolve_cache_dir(const std::string& flag_value, const fs::path& out_dir) {
    if (const char* env = std::getenv("TRIPLETFORGE_CACHE"); env && *env) return fs::path(env);
    if (!flag_value.empty()) return fs::path(flag_value);
    return out_dir / "cache";
}

void write_jsi(const fs::path& stem, const jsa::JointAmplitude& a, double omega0, const std::string& config_hash) {
    const auto& g = a.grid;
    json axes = json::array();
    for (const auto& ax : g.axis)
        axes.push_back({{"omega_min_rad_per_s", ax.omega_min}, {"omega_max_rad_per_s", ax.omega_max}, {"count", ax.count}});
    json h = {{"quantity", a.normalized ? "|f|^2, normalised so that sum |f|^2 dw^3 = 1" : "|f|^2, unnormalised"},
              {"layout", "omega_1-major, index (i1 * n2 + i2) * n3 + i3"},
              {"dtype", "float64 little-endian"},
              {"axes", axes},
              {"pump_omega_rad_per_s", omega0},
              {"norm_sum", a.norm_sum},
              {"scale", a.scale},
              {"boundary_ratio", a.boundary_ratio},
              {"data", stem.filename().string() + ".bin"},
              {"config_hash", config_hash}};
    write_json(fs::path(stem.string() + ".json"), h);
    write_f64(fs::path(stem.string() + ".bin"), a.intensity());
}

json report_to_json(const numerics::ConvergenceReport& r) {
    return {{"value", r.value}, {"rel_error", r.rel_error}, {"levels", r.levels}, {"converged", r.converged}};
}

}  // namespace tripletforge::io
