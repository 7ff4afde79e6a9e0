#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tripletforge/commands.hpp"
#include "tripletforge/errors.hpp"
#include "tripletforge/numerics.hpp"
#include "tripletforge/version.hpp"

using namespace tripletforge;

namespace {

int exit_code(const std::exception& e) {
    if (dynamic_cast<const ValidationError*>(&e)) return 2;
    if (dynamic_cast<const NumericalError*>(&e)) return 3;
    if (dynamic_cast<const IoError*>(&e)) return 4;
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Third-order parametric downconversion in thin fibers: JSI, seeded throughput, tomography"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string config_path, out_dir, cache_dir;
    std::size_t threads = 0;
    bool no_svg = false;
    for (const auto& [name, help] : std::initializer_list<std::pair<const char*, const char*>>{
             {"dispersion", "solve and cache the pump and triplet mode curves"},
             {"jsi", "three-photon joint spectral intensity with marginals"},
             {"scan", "seeded flux versus seed wavelength and the double-seed map"},
             {"table", "N1 and N2 for every pump/seed kind combination at the configured points"},
             {"set", "stimulated emission tomography raster and reconstruction"}}) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
        sub->add_option("--threads", threads, "worker threads, 0 = hardware concurrency");
        sub->add_flag("--no-svg", no_svg, "skip SVG plots");
        sub->add_option("--cache-dir", cache_dir, "dispersion cache directory (TRIPLETFORGE_CACHE wins)");
    }
    CLI11_PARSE(app, argc, argv);

    try {
        if (threads) numerics::set_thread_count(threads);
        const auto cfg = config::load_config(config_path);
        commands::Options opt;
        opt.out_dir = out_dir;
        opt.cache_dir = cache_dir;
        opt.svg = !no_svg;
        const auto summary = commands::run(app.get_subcommands().front()->get_name(), cfg, opt);
        std::cout << summary.dump(2) << "\n";
    } catch (const std::exception& e) {
        std::cerr << "tripletforge: error: " << e.what() << "\n";
        return exit_code(e);
    }
    return 0;
}
