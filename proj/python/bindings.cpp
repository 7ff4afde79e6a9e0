#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tripletforge/commands.hpp"
#include "tripletforge/config.hpp"
#include "tripletforge/constants.hpp"
#include "tripletforge/errors.hpp"
#include "tripletforge/seeding.hpp"
#include "tripletforge/version.hpp"

namespace py = pybind11;
using namespace tripletforge;
using nlohmann::json;

namespace {

json to_json(const py::object& o) {
    const auto s = py::module_::import("json").attr("dumps")(o).cast<std::string>();
    return json::parse(s);
}

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::array_t<double> array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

struct PySource {
    config::RunConfig cfg;
    jsa::Source src;
};

PySource make(const py::dict& d) {
    PySource p{config::parse_config(to_json(d)), {}};
    jsa::SourceOptions so;
    so.curve_points = p.cfg.curve_points;
    p.src = jsa::build_source(config::resolved_fiber(p.cfg), p.cfg.pump, p.cfg.triplet_mode, p.cfg.window,
                              p.cfg.fiber.chi3, so);
    return p;
}

}  // namespace

PYBIND11_MODULE(_tripletforge, m) {
    m.doc() = "Compiled core of tripletforge";
    m.attr("__version__") = kVersion;

    static py::exception<Error> base(m, "TripletforgeError");
    static py::exception<ValidationError> validation(m, "ValidationError", base.ptr());
    static py::exception<NumericalError> numerical(m, "NumericalError", base.ptr());
    static py::exception<ConvergenceError> convergence(m, "ConvergenceError", numerical.ptr());
    static py::exception<IoError> ioerr(m, "IoError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ValidationError& e) {
            py::set_error(validation, e.what());
        } catch (const ConvergenceError& e) {
            py::set_error(convergence, e.what());
        } catch (const NumericalError& e) {
            py::set_error(numerical, e.what());
        } catch (const IoError& e) {
            py::set_error(ioerr, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        }
    });

    m.def("set_thread_count", &numerics::set_thread_count, py::arg("n"));

    m.def(
        "material_index",
        [](double lambda_m) { return dispersion::material_index(dispersion::MaterialIndex::fused_silica(), lambda_m); },
        py::arg("lambda_m"), "Fused-silica Sellmeier index at a vacuum wavelength in metres.");

    m.def(
        "validate_config", [](const py::dict& d) { return config::parse_config(to_json(d)).hash; }, py::arg("config"),
        "Validate a run configuration; returns its hash.");

    py::class_<PySource>(m, "Source")
        .def_property_readonly("radius_m", [](const PySource& s) { return s.src.fiber.radius_m; })
        .def_property_readonly("gamma", [](const PySource& s) { return s.src.overlap.gamma; })
        .def_property_readonly("f_eff", [](const PySource& s) { return s.src.overlap.f_eff; })
        .def_property_readonly("n0", [](const PySource& s) { return s.src.n0(); })
        .def_property_readonly("pump_omega", [](const PySource& s) { return s.src.pump.omega0; })
        .def_property_readonly("window_omega",
                               [](const PySource& s) { return py::make_tuple(s.src.window.omega_min, s.src.window.omega_max); });

    m.def("build_source", &make, py::arg("config"), "Build a source from a configuration dict.");

    m.def(
        "spontaneous_rate",
        [](const PySource& s) {
            const auto r = jsa::spontaneous_rate(s.src, s.cfg.integration);
            py::dict d;
            d["c3_squared"] = r.c3sq;
            d["n0_per_s"] = r.n0_per_s;
            d["integral"] = r.integral;
            d["converged"] = r.report.converged;
            d["rel_error"] = r.report.rel_error;
            return d;
        },
        py::arg("source"));

    m.def(
        "jsi",
        [](const PySource& s, std::size_t points, bool normalized) {
            const auto g = jsa::FrequencyGrid::centered(s.src.window, s.src.pump.omega0 / 3.0, points);
            const auto a = jsa::joint_amplitude(s.src, g, normalized);
            const auto I = a.intensity();
            py::array_t<double> out({points, points, points});
            std::copy(I.begin(), I.end(), out.mutable_data());
            std::vector<double> w(points);
            for (std::size_t i = 0; i < points; ++i) w[i] = g.axis[0].at(i);
            return py::make_tuple(out, array(w));
        },
        py::arg("source"), py::arg("points") = 32, py::arg("normalized") = true,
        "Joint spectral intensity on a centred cube; returns (intensity, omega axis).");

    m.def(
        "throughput",
        [](const PySource& s, const py::list& seeds, std::size_t output_points) {
            std::vector<seeding::SeedSpec> specs;
            for (std::size_t i = 0; i < seeds.size(); ++i)
                specs.push_back(config::parse_seed(to_json(seeds[i]), s.src.pump, "seeds[" + std::to_string(i) + "]"));
            const auto rate = jsa::spontaneous_rate(s.src, s.cfg.integration);
            const auto axis = seeding::output_axis(s.src.window, output_points);
            const auto rep = seeding::throughput(s.src, rate, specs, axis, s.cfg.integration);
            py::dict d;
            d["case"] = rep.case_name;
            d["n0"] = rep.n0;
            d["n1"] = rep.n1;
            d["n2"] = rep.n2;
            std::vector<double> w(axis.count);
            for (std::size_t i = 0; i < axis.count; ++i) w[i] = axis.at(i);
            d["omega"] = array(w);
            d["n1_omega"] = array(rep.n1_omega);
            d["n2_omega"] = array(rep.n2_omega);
            py::list contribs;
            for (const auto& c : rep.contributions) {
                py::dict cd;
                cd["label"] = c.label;
                cd["flux"] = c.flux;
                cd["theta"] = c.theta;
                contribs.append(cd);
            }
            d["contributions"] = contribs;
            d["warnings"] = rep.warnings;
            return d;
        },
        py::arg("source"), py::arg("seeds"), py::arg("output_points") = 1024,
        "Seeded fluxes for a list of seed dicts (same keys as the config's seeds).");

    m.def(
        "seed_scan",
        [](const PySource& s, const py::dict& seed, const std::vector<double>& lambdas_nm, std::size_t output_points) {
            const auto tmpl = config::parse_seed(to_json(seed), s.src.pump);
            const auto rate = jsa::spontaneous_rate(s.src, s.cfg.integration);
            std::vector<double> l;
            for (double v : lambdas_nm) l.push_back(v * 1e-9);
            const auto rows = seeding::seed_scan(s.src, rate, tmpl, l, seeding::output_axis(s.src.window, output_points),
                                                 s.cfg.integration);
            std::vector<double> n1, n2;
            for (const auto& r : rows) {
                n1.push_back(r.n1);
                n2.push_back(r.n2_degenerate);
            }
            py::dict d;
            d["lambda_nm"] = array(lambdas_nm);
            d["n1"] = array(n1);
            d["n2_degenerate"] = array(n2);
            return d;
        },
        py::arg("source"), py::arg("seed"), py::arg("lambdas_nm"), py::arg("output_points") = 1024);

    m.def(
        "run_command",
        [](const std::string& command, const py::dict& cfg, const std::string& out_dir, bool svg) {
            commands::Options opt;
            opt.out_dir = out_dir;
            opt.svg = svg;
            opt.echo_log = false;
            return to_py(commands::run(command, config::parse_config(to_json(cfg)), opt));
        },
        py::arg("command"), py::arg("config"), py::arg("out_dir"), py::arg("svg") = false,
        "Run a CLI command in-process; returns its summary dict.");
}
