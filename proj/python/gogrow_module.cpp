#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gogrow/errors.hpp"
#include "gogrow/inside.hpp"
#include "gogrow/kinetic.hpp"
#include "gogrow/scenario.hpp"
#include "gogrow/speedlab.hpp"
#include "gogrow/waves.hpp"

namespace py = pybind11;
using namespace gog;

namespace {

py::dict roots_dict(const DecayRoots& r) {
    py::dict d;
    d["mu_minus"] = r.mu_minus;
    d["mu_plus"] = r.mu_plus;
    return d;
}

py::array_t<double> profile_values(double chi, double sigma, double amplitude, py::array_t<double> z) {
    const WaveProfile wp = parabolic_profile(chi, sigma, amplitude);
    auto in = z.unchecked<1>();
    py::array_t<double> out(in.shape(0));
    auto o = out.mutable_unchecked<1>();
    for (py::ssize_t i = 0; i < in.shape(0); ++i) o(i) = wp(in(i));
    return out;
}

py::dict spreading(double chi, const std::string& model, double epsilon, double dz, double dt, double t_end,
                   double z_min, double z_max, const std::string& initial) {
    SpreadingSetup s;
    s.params.chi = chi;
    s.params.epsilon = epsilon;
    if (model == "kinetic") {
        s.model = ModelKind::Kinetic;
    } else if (model != "parabolic") {
        throw PreconditionError("model must be 'parabolic' or 'kinetic'");
    }
    if (initial == "wave") {
        s.initial = InitialData::Wave;
    } else if (initial != "compact") {
        throw PreconditionError("initial must be 'compact' or 'wave'");
    }
    s.dz = dz;
    s.dt = dt;
    s.t_end = t_end;
    s.z_min = z_min;
    s.z_max = z_max;
    SpreadingRun r;
    {
        py::gil_scoped_release nogil;
        r = run_spreading(s);
    }
    std::vector<double> t, x;
    for (const auto& p : r.trajectory) {
        t.push_back(p.t);
        x.push_back(p.xbar);
    }
    py::dict d;
    d["speed"] = r.estimate.slope;
    d["predicted"] = predicted_speed(s);
    d["window"] = r.estimate.window;
    d["t"] = py::array_t<double>(static_cast<py::ssize_t>(t.size()), t.data());
    d["xbar"] = py::array_t<double>(static_cast<py::ssize_t>(x.size()), x.data());
    d["monotonicity_lost_steps"] = r.monotonicity_lost_steps;
    return d;
}

}  // namespace

PYBIND11_MODULE(_gogrow, m) {
    m.doc() = "Go-or-grow front models";
    m.attr("__version__") = kVersion;

    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    auto numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception<MonotonicityLost>(m, "MonotonicityLost", numerical.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("minimal_speed", &minimal_speed, py::arg("chi"));
    m.def("kinetic_minimal_speed", &kinetic_minimal_speed, py::arg("chi"), py::arg("epsilon"));
    m.def("decay_roots", [](double sigma) { return roots_dict(decay_roots(sigma)); }, py::arg("sigma"));
    m.def("kinetic_decay_roots",
          [](double sigma, double eps) { return roots_dict(kinetic_decay_roots(sigma, eps)); }, py::arg("sigma"),
          py::arg("epsilon"));
    m.def("spectral_gap", &spectral_gap, py::arg("chi"), py::arg("sigma"));
    m.def("subsonic_wave_exists", &subsonic_wave_exists, py::arg("chi"), py::arg("epsilon"), py::arg("sigma"));
    m.def(
        "characteristic_roots",
        [](double sigma, double eps) {
            const auto r = characteristic_polynomial(sigma, eps).roots();
            return std::vector<std::complex<double>>{r[0], r[1]};
        },
        py::arg("sigma"), py::arg("epsilon"));
    m.def("profile_values", &profile_values, py::arg("chi"), py::arg("sigma"), py::arg("amplitude"), py::arg("z"),
          "Closed-form density profile sampled at z.");
    m.def("run_spreading", &spreading, py::arg("chi"), py::arg("model") = "parabolic", py::arg("epsilon") = 0.25,
          py::arg("dz") = 0.05, py::arg("dt") = 0.02, py::arg("t_end") = 80.0, py::arg("z_min") = -50.0,
          py::arg("z_max") = 250.0, py::arg("initial") = "compact",
          "Spreading run; returns the fitted speed and the threshold trajectory.");
    m.def(
        "parse_config", [](const std::string& text) { return to_config_text(parse_config(text)); }, py::arg("text"),
        "Validates config text and returns it in canonical form.");
    m.def(
        "to_config_text", [](const std::string& text) { return to_config_text(parse_config(text, false)); },
        py::arg("text"), "Canonical form without validation.");
    m.def(
        "run_scenario",
        [](const std::string& text, const std::string& out_dir) {
            Scenario s = parse_config(text, false);
            s.output_dir = out_dir;
            ScenarioOutcome r;
            {
                py::gil_scoped_release nogil;
                r = run_scenario(s);
            }
            py::dict d;
            d["exit_code"] = r.exit_code;
            d["error"] = r.error;
            d["files"] = r.files;
            return d;
        },
        py::arg("text"), py::arg("out_dir"));
}
