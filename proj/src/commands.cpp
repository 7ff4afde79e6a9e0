#include "tripletforge/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "tripletforge/constants.hpp"
#include "tripletforge/errors.hpp"
#include "tripletforge/io.hpp"
#include "tripletforge/seeding.hpp"
#include "tripletforge/svg.hpp"
#include "tripletforge/tomography.hpp"
#include "tripletforge/version.hpp"

namespace tripletforge::commands {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

double nm(double m) { return m * 1e9; }
double thz(double w) { return w / (2.0 * constants::pi) * 1e-12; }

class Stopwatch {
public:
    Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

private:
    std::chrono::steady_clock::time_point t0_;
};

struct Context {
    const config::RunConfig& cfg;
    fs::path out;
    bool svg;
    io::Logger log;
    io::DispersionCache cache;
    json timings = json::object();
    json convergence = json::object();
    json outputs = json::array();
    dispersion::FiberSpec fiber;
    bool fiber_ready = false;

    Context(const config::RunConfig& c, fs::path o, const fs::path& cache_dir, bool s, bool echo)
        : cfg(c), out(std::move(o)), svg(s), log(echo), cache(cache_dir, &log) {}

    fs::path file(const std::string& name) {
        outputs.push_back(name);
        return out / name;
    }

    // Fiber with the radius re-solved for the design wavelength when requested.
    const dispersion::FiberSpec& fiber_spec() {
        if (fiber_ready) return fiber;
        fiber = cfg.fiber.spec;
        if (cfg.fiber.design_lambda_m) {
            Stopwatch sw;
            const double r = fiber.radius_m;
            fiber = config::resolved_fiber(cfg);
            std::ostringstream os;
            os.precision(10);
            os << "radius re-solved for degenerate phase matching at " << nm(*cfg.fiber.design_lambda_m)
               << " nm: " << fiber.radius_m * 1e6 << " um (configured " << r * 1e6 << " um)";
            log.info(os.str());
            timings["radius_calibration_s"] = sw.seconds();
        }
        fiber_ready = true;
        return fiber;
    }

    jsa::Source source(const jsa::PumpSpec& pump, std::optional<jsa::SpectralWindow> window) {
        Stopwatch sw;
        jsa::SourceOptions so;
        so.curve_points = cfg.curve_points;
        so.provider = cache.provider();
        auto s = jsa::build_source(fiber_spec(), pump, cfg.triplet_mode, window, cfg.fiber.chi3, so);
        timings["source_s"] = timings.value("source_s", 0.0) + sw.seconds();
        return s;
    }

    jsa::SpontaneousRate rate(const jsa::Source& s, const std::string& tag) {
        Stopwatch sw;
        auto r = jsa::spontaneous_rate(s, cfg.integration);
        timings["rate_s"] = timings.value("rate_s", 0.0) + sw.seconds();
        convergence["spontaneous " + tag] = io::report_to_json(r.report);
        return r;
    }
};

json window_json(const jsa::SpectralWindow& w) {
    return {{"lambda_min_nm", nm(constants::lambda_from_omega(w.omega_max))},
            {"lambda_max_nm", nm(constants::lambda_from_omega(w.omega_min))}};
}

json source_json(const jsa::Source& s) {
    return {{"radius_m", s.fiber.radius_m},
            {"length_m", s.fiber.length_m},
            {"pump_mode", s.pump.mode.str()},
            {"triplet_mode", s.triplet_mode.str()},
            {"pump_kind", to_string(s.pump.kind)},
            {"lambda_p_nm", nm(constants::lambda_from_omega(s.pump.omega0))},
            {"f_eff_per_m2", s.overlap.f_eff},
            {"gamma_per_W_m", s.overlap.gamma},
            {"chi3_m2_per_V2", s.overlap.chi3},
            {"n0", s.n0()},
            {"window", window_json(s.window)}};
}

json rate_json(const jsa::SpontaneousRate& r) {
    return {{"c3_squared", r.c3sq}, {"n0_per_s", r.n0_per_s}, {"integral", r.integral},
            {"convergence", io::report_to_json(r.report)}};
}

json conventions_json(const config::RunConfig& cfg) {
    const seeding::Conventions c;
    return {{"pulsed_seed_photons", c.pulsed_seed},
            {"cw_seed_photons", c.cw_seed},
            {"cw_pump_pulsed_seed", c.cw_pump_pulsed_seed},
            {"rate_units", c.rate_units},
            {"cw_double_seed", c.cw_double_seed},
            {"seed_band", c.seed_band},
            {"seed_delay_t0", "t0 taken from each seed's delay_fs, default 0 (pump and seed pulses coincide)"},
            {"tau_s", "2 / sigma_s for the effective pump duration seen by a pulsed seed under a cw pump"},
            {"chi3_m2_per_V2", cfg.fiber.chi3},
            {"seed_linewidth", "cw seeds map their linewidth delta_nu to delta_k = 2 pi delta_nu dk/domega"},
            {"index_in_rates", "material index n(omega) of the core in the rate prefactors"},
            {"f_eff", "scalar overlap of area-normalised x-polarised HE profiles, 1/m^2"},
            {"flux_coefficients",
             "N1 = 2 N0 |beta|^2 Theta1; self N2 = (N0/2) |beta|^4 Theta2; cross N2 = 2 N0 |beta_i|^2 |beta_j|^2 Theta2"},
            {"window", "triplet band where the degenerate-path sinc envelope exceeds 1e-4, padded 5% per side"},
            {"dispersion", "exact step-index HE solver, material Sellmeier core, cladding index from config"}};
}

std::vector<double> axis_nodes(const jsa::FrequencyAxis& a) {
    std::vector<double> x(a.count);
    for (std::size_t i = 0; i < a.count; ++i) x[i] = a.at(i);
    return x;
}

std::vector<double> lambda_grid(double lo, double hi, std::size_t n) { return dispersion::uniform_grid(lo, hi, n); }

seeding::SeedSpec seed_template(const config::RunConfig& cfg, SpectralKind kind, double power) {
    seeding::SeedSpec s;
    s.kind = kind;
    s.sigma = cfg.pump.sigma / 10.0;
    s.power_w = power;
    s.rep_rate_hz = cfg.pump.rep_rate_hz;
    return s;
}

// ---------------------------------------------------------------- dispersion

json cmd_dispersion(Context& ctx) {
    const auto& cfg = ctx.cfg;
    auto src = ctx.source(cfg.pump, cfg.window);
    json j = source_json(src);
    std::vector<svg::Series> series;
    for (const auto* curve : {src.triplet_curve.get(), src.pump_curve.get()}) {
        const auto& w = curve->omega();
        std::vector<double> lam(w.size()), ne(w.size()), k(w.size()), dk(w.size()), vg(w.size()), nmat(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            lam[i] = nm(constants::lambda_from_omega(w[i]));
            ne[i] = curve->n_eff_samples()[i];
            k[i] = curve->k(w[i]);
            dk[i] = curve->dk_domega(w[i]);
            vg[i] = 1.0 / dk[i];
            nmat[i] = src.fiber.core.n_at_omega(w[i]);
        }
        const std::string name = "dispersion_" + curve->label().str() + ".csv";
        io::write_csv(ctx.file(name),
                      {"lambda_nm", "omega_rad_per_s", "n_eff", "k_per_m", "dk_domega_s_per_m", "group_velocity_m_per_s",
                       "n_material"},
                      {lam, w, ne, k, dk, vg, nmat});
        j["curves"][curve->label().str()] = {{"file", name},
                                             {"cache_key", ctx.cache.key(src.fiber, curve->label(), w)},
                                             {"points", w.size()}};
        series.push_back({curve->label().str(), lam, ne});
    }
    if (ctx.svg) {
        svg::line_plot(ctx.file("dispersion.svg"), {"effective index", "wavelength (nm)", "n_eff", false},
                       {series[0]});
        svg::line_plot(ctx.file("dispersion_pump.svg"), {"pump mode effective index", "wavelength (nm)", "n_eff", false},
                       {series[1]});
    }
    j["cache"] = {{"dir", ctx.cache.dir().string()}, {"hits", ctx.cache.hits()}, {"misses", ctx.cache.misses()}};
    io::write_json(ctx.file("dispersion.json"), j);
    return j;
}

// ---------------------------------------------------------------- jsi

json cmd_jsi(Context& ctx) {
    const auto& cfg = ctx.cfg;
    auto src = ctx.source(cfg.pump, cfg.window);
    const auto grid = jsa::FrequencyGrid::centered(src.window, src.pump.omega0 / 3.0, cfg.jsi_points);
    Stopwatch sw;
    const auto a = jsa::joint_amplitude(src, grid, true);
    ctx.timings["jsi_s"] = sw.seconds();
    const auto I = a.intensity();
    const std::size_t n = grid.axis[0].count;
    const double h = grid.axis[0].step();
    const auto w = axis_nodes(grid.axis[0]);

    io::write_jsi(ctx.out / "jsi", a, src.pump.omega0, ctx.cfg.hash);
    ctx.outputs.push_back("jsi.json");
    ctx.outputs.push_back("jsi.bin");
    std::vector<double> lam(n);
    for (std::size_t i = 0; i < n; ++i) lam[i] = nm(constants::lambda_from_omega(w[i]));
    if (n <= 32) {
        std::vector<std::vector<double>> cols(4);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t jj = 0; jj < n; ++jj)
                for (std::size_t k = 0; k < n; ++k) {
                    cols[0].push_back(lam[i]);
                    cols[1].push_back(lam[jj]);
                    cols[2].push_back(lam[k]);
                    cols[3].push_back(I[grid.index(i, jj, k)]);
                }
        io::write_csv(ctx.file("jsi.csv"), {"lambda1_nm", "lambda2_nm", "lambda3_nm", "jsi_per_rad3_s3"}, cols);
    }

    // Two-dimensional marginals, integrating out the remaining axis.
    const char* names[3] = {"marginal_12", "marginal_13", "marginal_23"};
    std::vector<std::vector<double>> m(3, std::vector<double>(n * n, 0.0));
    std::vector<double> m1(n, 0.0), m2(n, 0.0), m3(n, 0.0);
    double total = 0.0;
    std::size_t peak = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t jj = 0; jj < n; ++jj)
            for (std::size_t k = 0; k < n; ++k) {
                const double v = I[grid.index(i, jj, k)];
                m[0][i * n + jj] += v * h;
                m[1][i * n + k] += v * h;
                m[2][jj * n + k] += v * h;
                m1[i] += v * h * h;
                m2[jj] += v * h * h;
                m3[k] += v * h * h;
                total += v;
                if (v > I[peak]) peak = grid.index(i, jj, k);
            }
    total *= grid.cell_volume();
    for (int p = 0; p < 3; ++p) {
        std::vector<double> la, lb, val;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t jj = 0; jj < n; ++jj) {
                la.push_back(lam[i]);
                lb.push_back(lam[jj]);
                val.push_back(m[p][i * n + jj]);
            }
        io::write_csv(ctx.file(std::string(names[p]) + ".csv"), {"lambda_a_nm", "lambda_b_nm", "density_per_rad2_s2"},
                      {la, lb, val});
        if (ctx.svg) {
            std::vector<double> f(n);
            for (std::size_t i = 0; i < n; ++i) f[i] = thz(w[i]);
            // rows are the second axis
            std::vector<double> t(n * n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t jj = 0; jj < n; ++jj) t[jj * n + i] = m[p][i * n + jj];
            svg::heatmap(ctx.file(std::string(names[p]) + ".svg"),
                         {std::string("JSI ") + names[p], "frequency a (THz)", "frequency b (THz)", false}, f, f, t);
        }
    }
    io::write_csv(ctx.file("marginal_1d.csv"), {"lambda_nm", "marginal_1", "marginal_2", "marginal_3"},
                  {lam, m1, m2, m3});
    // Integrated across the pump ridge; the grid sums above alias once the grid step nears sigma_p.
    Stopwatch ms;
    const auto mi = jsa::single_photon_marginal(src, grid.axis[0], cfg.integration);
    ctx.timings["marginal_s"] = ms.seconds();
    io::write_csv(ctx.file("marginal_1d_integrated.csv"), {"lambda_nm", "density_per_rad_s"}, {lam, mi.density});
    const std::size_t pi = peak / (n * n), pj = (peak / n) % n, pk = peak % n;
    json j = source_json(src);
    j["grid_points"] = n;
    j["normalisation_integral"] = total;
    j["boundary_ratio"] = a.boundary_ratio;
    j["marginal_convergence"] = io::report_to_json(mi.report);
    j["peak_lambda_nm"] = {lam[pi], lam[pj], lam[pk]};
    j["degenerate_lambda_nm"] = nm(3.0 * constants::lambda_from_omega(src.pump.omega0));
    io::write_json(ctx.file("jsi_summary.json"), j);
    return j;
}

// ---------------------------------------------------------------- scan

json cmd_scan(Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (!cfg.scan) throw ValidationError("scan command needs a 'scan' section");
    if (cfg.seeds.empty()) throw ValidationError("scan command needs a seed template in seeds[0]");
    const auto& sc = *cfg.scan;
    auto src = ctx.source(cfg.pump, cfg.window);
    const auto rate = ctx.rate(src, "scan");
    const auto axis = seeding::output_axis(src.window, cfg.output_points);
    const auto& tmpl = cfg.seeds.front();
    json j = source_json(src);
    j["rate"] = rate_json(rate);
    j["case"] = seeding::case_name(src.pump, tmpl.kind);

    Stopwatch sw;
    const auto lams = lambda_grid(sc.lambda_min_m, sc.lambda_max_m, sc.points);
    const auto rows = seeding::seed_scan(src, rate, tmpl, lams, axis, cfg.integration);
    std::vector<double> l, n1, n2;
    for (const auto& r : rows) {
        l.push_back(nm(r.lambda_seed_m));
        n1.push_back(r.n1);
        n2.push_back(r.n2_degenerate);
    }
    io::write_csv(ctx.file("scan.csv"), {"lambda_seed_nm", "n1_per_s", "n2_degenerate_per_s"}, {l, n1, n2});
    ctx.timings["scan_s"] = sw.seconds();
    if (ctx.svg)
        svg::line_plot(ctx.file("scan.svg"), {"seeded flux vs seed wavelength", "seed wavelength (nm)", "photons/s", true},
                       {{"N1", l, n1}, {"N2 (degenerate seeds)", l, n2}});
    j["scan"] = {{"file", "scan.csv"}, {"points", rows.size()}};

    if (sc.map_points) {
        Stopwatch ms;
        const auto ml = lambda_grid(sc.lambda_min_m, sc.lambda_max_m, sc.map_points);
        const auto map = seeding::double_seed_map(src, rate, tmpl, ml, ml, axis, cfg.integration);
        std::vector<double> li, lj;
        for (std::size_t a = 0; a < ml.size(); ++a)
            for (std::size_t b = 0; b < ml.size(); ++b) {
                li.push_back(nm(ml[a]));
                lj.push_back(nm(ml[b]));
            }
        io::write_csv(ctx.file("double_seed_map.csv"), {"lambda_i_nm", "lambda_j_nm", "n2_per_s"}, {li, lj, map});
        ctx.timings["map_s"] = ms.seconds();
        if (ctx.svg) {
            std::vector<double> x(ml.size());
            for (std::size_t a = 0; a < ml.size(); ++a) x[a] = nm(ml[a]);
            std::vector<double> t(map.size());
            for (std::size_t a = 0; a < ml.size(); ++a)
                for (std::size_t b = 0; b < ml.size(); ++b) t[b * ml.size() + a] = map[a * ml.size() + b];
            svg::heatmap(ctx.file("double_seed_map.svg"),
                         {"doubly seeded flux", "lambda_i (nm)", "lambda_j (nm)", false}, x, x, t, true);
        }
        j["map"] = {{"file", "double_seed_map.csv"}, {"points", ml.size()}};
    }

    for (double ls : sc.spectra_lambda_m) {
        auto seed = tmpl;
        seed.omega = constants::omega_from_lambda(ls);
        const auto rep = seeding::throughput(src, rate, {seed}, axis, cfg.integration);
        for (const auto& w : rep.warnings) ctx.log.warn(w);
        const auto s1 = seeding::to_lambda(axis, rep.n1_omega);
        const auto s2 = seeding::to_lambda(axis, rep.n2_omega);
        std::vector<double> lam(s1.lambda_m.size()), d1(s1.density.size()), d2(s2.density.size());
        for (std::size_t i = 0; i < lam.size(); ++i) {
            lam[i] = nm(s1.lambda_m[i]);
            d1[i] = s1.density[i] * 1e-9;
            d2[i] = s2.density[i] * 1e-9;
        }
        char name[64];
        std::snprintf(name, sizeof name, "spectrum_%.1fnm.csv", nm(ls));
        io::write_csv(ctx.file(name), {"lambda_nm", "n1_per_s_per_nm", "n2_per_s_per_nm"}, {lam, d1, d2});
        const double i1 = seeding::trapezoid(lam, d1), i2 = seeding::trapezoid(lam, d2);
        j["spectra"].push_back({{"file", name},
                                {"lambda_seed_nm", nm(ls)},
                                {"n1_per_s", rep.n1},
                                {"n2_per_s", rep.n2},
                                {"n1_spectrum_integral", i1},
                                {"n2_spectrum_integral", i2}});
        if (ctx.svg) {
            std::string svgname(name);
            svgname.replace(svgname.size() - 4, 4, ".svg");
            svg::line_plot(ctx.file(svgname), {"seeded emission spectrum", "wavelength (nm)", "photons/s/nm", true},
                           {{"N1", lam, d1}, {"N2", lam, d2}});
        }
    }
    io::write_json(ctx.file("scan_summary.json"), j);
    return j;
}

// ---------------------------------------------------------------- table

json cmd_table(Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (!cfg.table) throw ValidationError("table command needs a 'table' section");
    const auto& tc = *cfg.table;
    bool any_pulsed = false;
    for (const auto& [pk, sk] : tc.combinations)
        any_pulsed = any_pulsed || pk == SpectralKind::Pulsed || sk == SpectralKind::Pulsed;
    if (any_pulsed && !(cfg.pump.sigma > 0.0 && cfg.pump.rep_rate_hz > 0.0))
        throw ValidationError("pulsed table combinations need pump.sigma_rad_per_ps and pump.rep_rate_MHz");

    json j;
    j["combinations"] = json::array();
    std::vector<std::vector<std::string>> rows;
    std::vector<std::vector<std::string>> contrib_rows;
    for (const auto& pt : tc.points) {
        jsa::PumpSpec base = cfg.pump;
        base.kind = SpectralKind::Pulsed;
        base.omega0 = constants::omega_from_lambda(pt.lambda_p_m);
        const auto built = ctx.source(base, std::nullopt);
        const auto axis = seeding::output_axis(built.window, cfg.output_points);
        std::map<SpectralKind, std::pair<jsa::Source, jsa::SpontaneousRate>> by_kind;
        for (const auto& [pk, sk] : tc.combinations) {
            if (!by_kind.count(pk)) {
                jsa::PumpSpec p = base;
                p.kind = pk;
                auto s = jsa::make_source(built.fiber, p, built.triplet_mode, built.window, built.overlap,
                                          *built.pump_curve, *built.triplet_curve);
                auto r = ctx.rate(s, pt.label + " " + to_string(pk));
                by_kind.emplace(pk, std::make_pair(std::move(s), r));
            }
            const auto& [src, rate] = by_kind.at(pk);
            std::vector<seeding::SeedSpec> seeds;
            for (double ls : pt.seeds_m) {
                auto s = seed_template(cfg, sk, tc.seed_power_w);
                s.omega = constants::omega_from_lambda(ls);
                seeds.push_back(s);
            }
            Stopwatch sw;
            const auto rep = seeding::throughput(src, rate, seeds, axis, cfg.integration);
            const double dt = sw.seconds();
            for (const auto& w : rep.warnings) ctx.log.warn(pt.label + " " + rep.case_name + ": " + w);
            json entry = {{"point", pt.label},
                          {"lambda_p_nm", nm(pt.lambda_p_m)},
                          {"case", rep.case_name},
                          {"pump_kind", to_string(pk)},
                          {"seed_kind", to_string(sk)},
                          {"n0_per_s", rep.n0},
                          {"n1_per_s", rep.n1},
                          {"n2_per_s", rep.n2},
                          {"flux_scale", rep.flux_scale},
                          {"warnings", rep.warnings},
                          {"seconds", dt}};
            for (double ls : pt.seeds_m) entry["seeds_nm"].push_back(nm(ls));
            for (const auto& c : rep.contributions) {
                entry["contributions"].push_back({{"label", c.label}, {"flux_per_s", c.flux}, {"theta", c.theta}});
                contrib_rows.push_back({pt.label, rep.case_name, c.label, io::fmt(c.flux), io::fmt(c.theta)});
            }
            j["combinations"].push_back(entry);
            std::string seeds_s;
            for (double ls : pt.seeds_m) seeds_s += (seeds_s.empty() ? "" : ";") + io::fmt(nm(ls));
            rows.push_back({pt.label, io::fmt(nm(pt.lambda_p_m)), seeds_s, to_string(pk), to_string(sk),
                            io::fmt(rep.n0), io::fmt(rep.n1), io::fmt(rep.n2)});
            ctx.timings["table " + pt.label + " " + rep.case_name + " s"] = dt;
        }
    }
    io::write_csv_rows(ctx.file("table.csv"),
                       {"point", "lambda_p_nm", "seeds_nm", "pump_kind", "seed_kind", "n0_per_s", "n1_per_s",
                        "n2_per_s"},
                       rows);
    io::write_csv_rows(ctx.file("table_contributions.csv"), {"point", "case", "contribution", "flux_per_s", "theta"},
                       contrib_rows);
    io::write_json(ctx.file("table.json"), j);
    return j;
}

// ---------------------------------------------------------------- set

json cmd_set(Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (!cfg.set) throw ValidationError("set command needs a 'set' section with seed grids");
    if (!cfg.pump.pulsed()) throw ValidationError("stimulated emission tomography needs a pulsed pump");
    const auto& sc = *cfg.set;
    auto src = ctx.source(cfg.pump, cfg.window);
    const auto rate = ctx.rate(src, "set");

    tomography::SetScanConfig scan;
    // seed grid uniform in omega
    const double wlo = constants::omega_from_lambda(sc.lambda_max_m), whi = constants::omega_from_lambda(sc.lambda_min_m);
    for (double w : dispersion::uniform_grid(wlo, whi, sc.points)) {
        scan.lambda_i_m.push_back(constants::lambda_from_omega(w));
        scan.lambda_j_m.push_back(constants::lambda_from_omega(w));
    }
    scan.power_i_w = sc.power_i_w;
    scan.power_j_w = sc.power_j_w;
    scan.linewidth_hz = sc.linewidth_hz;
    scan.skip_diagonal = sc.skip_diagonal;
    scan.output = seeding::output_axis(src.window, cfg.output_points);

    Stopwatch sw;
    const auto raster = tomography::simulate_set_scan(src, rate, scan, cfg.integration);
    ctx.timings["set_simulate_s"] = sw.seconds();
    for (const auto& n : raster.notes) ctx.log.warn(n);
    Stopwatch rw;
    const auto rec = tomography::reconstruct_jsi(raster);
    ctx.timings["set_reconstruct_s"] = rw.seconds();
    for (const auto& n : rec.notes) ctx.log.warn(n);
    Stopwatch tw;
    const auto truth = tomography::truth_on_raster(src, rate, raster);
    const auto cell = tomography::cell_averaged_truth(src, rate, raster, sc.truth_subsamples);
    const auto cell_marginal = tomography::k1_marginal(raster, cell);
    const auto truth_marginal = tomography::k1_marginal(raster, truth);
    ctx.timings["set_truth_s"] = tw.seconds();

    double max_rel = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (std::isfinite(truth[i]) && truth[i] > 0.0 && std::isfinite(rec.values[i]))
            max_rel = std::max(max_rel, std::abs(rec.values[i] - truth[i]) / truth[i]);

    const std::size_t ni = scan.lambda_i_m.size(), nj = scan.lambda_j_m.size();
    std::vector<std::vector<std::string>> rrows;
    std::vector<double> li, lj, rm, tm, cm;
    for (const auto& p : raster.points) {
        rrows.push_back({std::to_string(p.i), std::to_string(p.j), io::fmt(nm(constants::lambda_from_omega(p.omega_i))),
                         io::fmt(nm(constants::lambda_from_omega(p.omega_j))), p.skipped ? "1" : "0",
                         io::fmt(p.beta2_i), io::fmt(p.beta2_j), io::fmt(p.dk_i), io::fmt(p.dk_j),
                         io::fmt(p.cross_flux), io::fmt(p.single_flux), io::fmt(p.self_flux), io::fmt(p.single_ratio),
                         io::fmt(p.self_ratio)});
        const std::size_t idx = p.i * nj + p.j;
        li.push_back(nm(constants::lambda_from_omega(p.omega_i)));
        lj.push_back(nm(constants::lambda_from_omega(p.omega_j)));
        rm.push_back(rec.marginal[idx]);
        tm.push_back(truth_marginal[idx]);
        cm.push_back(cell_marginal[idx]);
    }
    io::write_csv_rows(ctx.file("set_raster.csv"),
                       {"i", "j", "lambda_i_nm", "lambda_j_nm", "skipped", "beta2_i", "beta2_j", "dk_i_per_m",
                        "dk_j_per_m", "cross_flux_per_s", "single_flux_per_s", "self_flux_per_s", "single_ratio",
                        "self_ratio"},
                       rrows);
    io::write_csv(ctx.file("set_marginal.csv"),
                  {"lambda_i_nm", "lambda_j_nm", "reconstructed", "truth_nodal", "truth_cell_averaged"},
                  {li, lj, rm, tm, cm});
    std::vector<double> spectra;
    spectra.reserve(raster.points.size() * scan.output.count);
    for (const auto& p : raster.points) {
        if (p.spectrum.empty())
            spectra.insert(spectra.end(), scan.output.count, 0.0);
        else
            spectra.insert(spectra.end(), p.spectrum.begin(), p.spectrum.end());
    }
    io::write_f64(ctx.file("set_raster_spectra.bin"), spectra);

    // Raster archive: one CSV spectrum per measured point plus a manifest.
    const fs::path arch = ctx.out / "set_raster";
    io::ensure_dir(arch);
    std::vector<double> l1(scan.output.count), w1(scan.output.count);
    for (std::size_t k = 0; k < scan.output.count; ++k) {
        w1[k] = scan.output.at(k);
        l1[k] = nm(constants::lambda_from_omega(w1[k]));
    }
    json pts = json::array();
    for (const auto& p : raster.points) {
        json e = {{"i", p.i}, {"j", p.j}, {"skipped", p.skipped}, {"dk_i_per_m", p.dk_i}, {"dk_j_per_m", p.dk_j},
                  {"beta2_i", p.beta2_i}, {"beta2_j", p.beta2_j}};
        if (!p.skipped && !p.spectrum.empty()) {
            const std::string name = "point_" + std::to_string(p.i) + "_" + std::to_string(p.j) + ".csv";
            io::write_csv(arch / name, {"lambda1_nm", "omega1_rad_per_s", "n2_per_s_per_unit_k1"}, {l1, w1, p.spectrum});
            e["file"] = name;
        } else if (!p.note.empty()) {
            e["note"] = p.note;
        }
        pts.push_back(e);
    }
    auto to_nm = [](const std::vector<double>& v) {
        std::vector<double> o;
        for (double x : v) o.push_back(nm(x));
        return o;
    };
    io::write_json(ctx.file("set_raster/manifest.json"),
                   {{"config_hash", cfg.hash},
                    {"lambda_i_nm", to_nm(scan.lambda_i_m)},
                    {"lambda_j_nm", to_nm(scan.lambda_j_m)},
                    {"power_i_W", scan.power_i_w},
                    {"power_j_W", scan.power_j_w},
                    {"linewidth_Hz", scan.linewidth_hz},
                    {"skip_diagonal", scan.skip_diagonal},
                    {"dk_convention", "dk = 2 pi linewidth dk/domega at the seed frequency"},
                    {"points", pts}});
    io::write_f64(ctx.file("set_reconstruction.bin"), rec.values);
    io::write_json(ctx.file("set_reconstruction.json"),
                   {{"layout", "(i * nj + j) * nk + k, k over the output omega_1 axis"},
                    {"dtype", "float64 little-endian, NaN where undefined"},
                    {"quantity", "(N0/2) |phi(k1, k_i, k_j)|^2"},
                    {"raster_spectra", "set_raster_spectra.bin, N2_ij(k1) per unit k1, same layout"},
                    {"config_hash", cfg.hash},
                    {"ni", ni},
                    {"nj", nj},
                    {"nk", rec.nk},
                    {"omega1_min_rad_per_s", scan.output.omega_min},
                    {"omega1_max_rad_per_s", scan.output.omega_max},
                    {"lambda_i_nm", [&] {
                         std::vector<double> v;
                         for (double l : scan.lambda_i_m) v.push_back(nm(l));
                         return v;
                     }()}});
    if (ctx.svg) {
        std::vector<double> x(ni);
        for (std::size_t i = 0; i < ni; ++i) x[i] = thz(constants::omega_from_lambda(scan.lambda_i_m[i]));
        std::vector<double> t(ni * nj), c(ni * nj);
        for (std::size_t i = 0; i < ni; ++i)
            for (std::size_t jj = 0; jj < nj; ++jj) {
                t[jj * ni + i] = rec.marginal[i * nj + jj];
                c[jj * ni + i] = cell_marginal[i * nj + jj];
            }
        svg::heatmap(ctx.file("set_reconstruction.svg"), {"reconstructed JSI marginal", "seed i (THz)", "seed j (THz)", false},
                     x, x, t);
        svg::heatmap(ctx.file("set_truth.svg"), {"cell-averaged true JSI marginal", "seed i (THz)", "seed j (THz)", false},
                     x, x, c);
    }

    json j = source_json(src);
    j["rate"] = rate_json(rate);
    j["raster"] = {{"ni", ni}, {"nj", nj}, {"output_points", rec.nk}, {"skip_diagonal", sc.skip_diagonal}};
    j["fidelity_nodal_3d"] = tomography::fidelity(rec.values, truth);
    j["fidelity_marginal_vs_cell_averaged"] = tomography::fidelity(rec.marginal, cell_marginal);
    j["fidelity_3d_vs_cell_averaged"] = tomography::fidelity(rec.values, cell);
    j["roundtrip_max_rel_error"] = max_rel;
    j["min_contamination_ratio"] = rec.min_contamination_ratio;
    j["reconstruction_integral"] = tomography::integrate_reconstruction(src, raster, rec);
    j["half_n0_per_s"] = 0.5 * rate.n0_per_s;
    j["notes"] = rec.notes;
    io::write_json(ctx.file("set_fidelity.json"), j);
    return j;
}

}  // namespace

json run(const std::string& command, const config::RunConfig& cfg, const Options& opt) {
    static const std::map<std::string, json (*)(Context&)> table = {
        {"dispersion", cmd_dispersion}, {"jsi", cmd_jsi}, {"scan", cmd_scan}, {"table", cmd_table}, {"set", cmd_set}};
    const auto it = table.find(command);
    if (it == table.end())
        throw ValidationError("unknown command '" + command + "' (expected dispersion, jsi, scan, table or set)");
    const fs::path out = opt.out_dir.empty() ? fs::path(cfg.out_dir) : opt.out_dir;
    io::ensure_dir(out);
    Context ctx(cfg, out, io::resolve_cache_dir(opt.cache_dir, out), opt.svg && cfg.svg, opt.echo_log);
    ctx.log.info(command + ": config " + cfg.hash + ", " + std::to_string(numerics::thread_count()) + " threads");

    Stopwatch total;
    json summary;
    json manifest = {{"tool", "tripletforge"},
                     {"version", kVersion},
                     {"command", command},
                     {"config_hash", cfg.hash},
                     {"config", cfg.raw},
                     {"conventions", conventions_json(cfg)}};
    try {
        summary = it->second(ctx);
    } catch (const std::exception& e) {
        ctx.log.warn(std::string("run failed: ") + e.what());
        manifest["status"] = "failed";
        manifest["error"] = e.what();
        manifest["log"] = ctx.log.lines();
        io::write_json(out / "manifest.json", manifest);
        ctx.log.write(out / "run.log");
        throw;
    }
    ctx.timings["total_s"] = total.seconds();
    manifest["status"] = "ok";
    if (ctx.fiber_ready) manifest["fiber"] = io::fiber_to_json(ctx.fiber);
    manifest["convergence"] = ctx.convergence;
    manifest["cache"] = {{"dir", ctx.cache.dir().string()}, {"hits", ctx.cache.hits()}, {"misses", ctx.cache.misses()}};
    manifest["outputs"] = ctx.outputs;
    manifest["warnings"] = ctx.log.warnings();
    // Wall-clock entries are the only non-reproducible content of a run.
    manifest["timings"] = ctx.timings;
    io::write_json(out / "manifest.json", manifest);
    ctx.log.write(out / "run.log");
    return summary;
}

}  // namespace tripletforge::commands
