#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "tripletforge/dispersion.hpp"
#include "tripletforge/jsa.hpp"

namespace tripletforge::io {

namespace fs = std::filesystem;

// Collects log lines; optionally echoes them to stderr.
class Logger {
public:
    explicit Logger(bool echo = true) : echo_(echo) {}
    void info(const std::string& msg);
    void warn(const std::string& msg);
    const std::vector<std::string>& lines() const { return lines_; }
    std::vector<std::string> warnings() const;
    void write(const fs::path& path) const;

private:
    bool echo_;
    std::vector<std::string> lines_;
};

// Scientific notation with 9 significant digits.
std::string fmt(double v);

void ensure_dir(const fs::path& dir);

// Header row then one row per entry; all columns must have equal length.
void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);
// Rows of preformatted cells.
void write_csv_rows(const fs::path& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
Csv read_csv(const fs::path& path);

void write_json(const fs::path& path, const nlohmann::json& j);
nlohmann::json read_json(const fs::path& path);

// Raw little-endian float64.
void write_f64(const fs::path& path, const std::vector<double>& v);
std::vector<double> read_f64(const fs::path& path);

nlohmann::json mode_curve_to_json(const dispersion::ModeCurve& c);
dispersion::ModeCurve mode_curve_from_json(const nlohmann::json& j);

nlohmann::json fiber_to_json(const dispersion::FiberSpec& f);

// Content-addressed store of solved mode curves.
class DispersionCache {
public:
    DispersionCache(fs::path dir, Logger* log);

    const fs::path& dir() const { return dir_; }
    std::string key(const dispersion::FiberSpec& fiber, const dispersion::ModeLabel& label,
                    const std::vector<double>& grid) const;
    fs::path path_for(const std::string& key) const { return dir_ / ("mode-" + key + ".json"); }

    dispersion::ModeCurve get(const dispersion::FiberSpec& fiber, const dispersion::ModeLabel& label,
                              const std::vector<double>& grid);
    jsa::CurveProvider provider();

    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }

private:
    fs::path dir_;
    Logger* log_;
    std::size_t hits_ = 0, misses_ = 0;
};

// TRIPLETFORGE_CACHE, else the given fallback.
fs::path resolve_cache_dir(const std::string& flag_value, const fs::path& out_dir);

// JSI export: header JSON plus little-endian float64 intensity, omega_1-major.
void write_jsi(const fs::path& stem, const jsa::JointAmplitude& jsa, double omega0, const std::string& config_hash);

nlohmann::json report_to_json(const numerics::ConvergenceReport& r);

}  // namespace tripletforge::io
