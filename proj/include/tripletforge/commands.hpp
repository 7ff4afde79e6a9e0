#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "tripletforge/config.hpp"

namespace tripletforge::commands {

struct Options {
    std::filesystem::path out_dir;  // empty: use the config's output.dir
    std::string cache_dir;          // empty: TRIPLETFORGE_CACHE or <out>/cache
    bool svg = true;
    bool echo_log = true;
};

// Runs one of dispersion|jsi|scan|table|set, writes its files plus
// manifest.json and run.log, and returns the command summary.
nlohmann::json run(const std::string& command, const config::RunConfig& cfg, const Options& opt);

}  // namespace tripletforge::commands
