#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "wgfocus/config.hpp"
#include "wgfocus/errors.hpp"
#include "wgfocus/experiments.hpp"
#include "wgfocus/validation.hpp"
#include "wgfocus/version.hpp"

namespace py = pybind11;
using namespace wgfocus;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::array_t<double> shaped(const PopulationMap& m, const std::vector<double>& v) {
    std::vector<py::ssize_t> shape = {static_cast<py::ssize_t>(m.spot_sizes.size()),
                                      static_cast<py::ssize_t>(m.focal_points.size()),
                                      static_cast<py::ssize_t>(m.amplitudes.size()),
                                      static_cast<py::ssize_t>(m.qubit_count)};
    py::array_t<double> out(shape);
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<double> as_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    return {a.data(), a.data() + a.size()};
}

py::dict waveform_dict(const SampledWaveform& w) {
    const auto sig = analytic_signal(w);
    std::vector<double> t(w.samples.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = w.time(i);
    py::dict d;
    d["t"] = to_array(t);
    d["field"] = to_array(w.samples);
    d["envelope"] = to_array(sig.envelope);
    d["instantaneous_frequency"] = to_array(sig.instantaneous_frequency);
    d["position_m"] = w.position_m;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Self-focusing waveguide pulses and position-selective qubit driving";
    m.attr("__version__") = kVersion;

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    auto numeric = py::register_exception<NumericError>(m, "NumericError", base.ptr());
    py::register_exception<WindowingError>(m, "WindowingError", numeric.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    // ---- waveguide / pulse ------------------------------------------------------

    py::class_<WaveguideSpec>(m, "WaveguideSpec")
        .def(py::init<>())
        .def_readwrite("broad_dim_m", &WaveguideSpec::broad_dim_m)
        .def_readwrite("narrow_dim_m", &WaveguideSpec::narrow_dim_m)
        .def_readwrite("length_m", &WaveguideSpec::length_m)
        .def_readwrite("medium_speed", &WaveguideSpec::medium_speed)
        .def("validate", &WaveguideSpec::validate);

    py::class_<DispersionModel>(m, "DispersionModel")
        .def_property_readonly("cutoff_angular_frequency", &DispersionModel::cutoff_angular_frequency)
        .def_property_readonly("cutoff_wavevector", &DispersionModel::cutoff_wavevector)
        .def("omega_of_k", &DispersionModel::omega_of_k)
        .def("k_of_omega", &DispersionModel::k_of_omega)
        .def("group_velocity", &DispersionModel::group_velocity)
        .def("phase_velocity", &DispersionModel::phase_velocity)
        .def("guide_wavelength", &DispersionModel::guide_wavelength);

    m.def("cutoff_from_geometry", &cutoff_from_geometry, py::arg("spec") = WaveguideSpec{});
    m.def("mode_cutoff_angular_frequency", &mode_cutoff_angular_frequency, py::arg("spec"), py::arg("m"),
          py::arg("n"));

    py::class_<PulseSpec>(m, "PulseSpec")
        .def(py::init<>())
        .def_static("centered_at", &PulseSpec::centered_at, py::arg("model"), py::arg("central_angular_frequency"),
                    py::arg("spot_size_m"), py::arg("focal_point_m"))
        .def_readwrite("amplitude", &PulseSpec::amplitude)
        .def_readwrite("spot_size_m", &PulseSpec::spot_size_m)
        .def_readwrite("central_wavevector", &PulseSpec::central_wavevector)
        .def_readwrite("focal_point_m", &PulseSpec::focal_point_m)
        .def_readwrite("highpass_coefficient", &PulseSpec::highpass_coefficient)
        .def_readwrite("highpass_enabled", &PulseSpec::highpass_enabled);

    m.def(
        "field_at",
        [](const PulseSpec& spec, const DispersionModel& model, double z, std::vector<double> window_positions) {
            if (window_positions.empty()) window_positions = {z};
            const auto grid = plan_time_grid(spec, model, window_positions);
            return waveform_dict(field_at_position(spec, model, z, grid));
        },
        py::arg("spec"), py::arg("model"), py::arg("z"), py::arg("window_positions") = std::vector<double>{},
        "Real field and envelope at z on a window covering `window_positions` (default: z).");

    py::class_<CompressionReport>(m, "CompressionReport")
        .def_readonly("length_m", &CompressionReport::length_m)
        .def_readonly("input_fwhm_s", &CompressionReport::input_fwhm_s)
        .def_readonly("focal_fwhm_s", &CompressionReport::focal_fwhm_s)
        .def_readonly("ratio", &CompressionReport::ratio);

    // ---- scenario ------------------------------------------------------------------

    py::enum_<DetuningConvention>(m, "DetuningConvention")
        .value("literal", DetuningConvention::literal)
        .value("rotating_frame", DetuningConvention::rotating_frame);

    py::class_<TransmonSpec>(m, "TransmonSpec")
        .def(py::init<>())
        .def_readwrite("transition_frequency", &TransmonSpec::transition_frequency)
        .def_readwrite("anharmonicity", &TransmonSpec::anharmonicity)
        .def_readwrite("level_count", &TransmonSpec::level_count)
        .def_readwrite("dipole_scale", &TransmonSpec::dipole_scale)
        .def_readwrite("position_m", &TransmonSpec::position_m)
        .def_readwrite("detuning", &TransmonSpec::detuning);

    py::class_<ReflectionSpec>(m, "ReflectionSpec")
        .def(py::init<double, double, int>(), py::arg("amplitude"), py::arg("point_m"), py::arg("phase") = 1)
        .def_readwrite("amplitude", &ReflectionSpec::amplitude)
        .def_readwrite("point_m", &ReflectionSpec::point_m)
        .def_readwrite("phase", &ReflectionSpec::phase);

    py::class_<QubitSite>(m, "QubitSite")
        .def(py::init<>())
        .def_readwrite("transmon", &QubitSite::transmon)
        .def_readwrite("reflection", &QubitSite::reflection);

    py::enum_<EvolutionModel>(m, "EvolutionModel")
        .value("rwa", EvolutionModel::rwa)
        .value("lab_frame", EvolutionModel::lab_frame);

    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_static("single_qubit", &Scenario::single_qubit)
        .def_static("two_qubit", &Scenario::two_qubit)
        .def_readwrite("name", &Scenario::name)
        .def_readwrite("waveguide", &Scenario::waveguide)
        .def_readwrite("central_frequency", &Scenario::central_frequency)
        .def_readwrite("spot_size_m", &Scenario::spot_size_m)
        .def_readwrite("focal_point_m", &Scenario::focal_point_m)
        .def_readwrite("field_amplitude", &Scenario::field_amplitude)
        .def_readwrite("highpass_coefficient", &Scenario::highpass_coefficient)
        .def_readwrite("highpass_enabled", &Scenario::highpass_enabled)
        .def_readwrite("qubits", &Scenario::qubits)
        .def_readwrite("model", &Scenario::model)
        .def("dispersion", &Scenario::dispersion)
        .def("pulse", py::overload_cast<double, double>(&Scenario::pulse, py::const_), py::arg("focal_point_m"),
             py::arg("spot_size_m"))
        .def("validate", &Scenario::validate);

    m.def("compression_experiment", &compression_experiment, py::arg("scenario"), py::arg("length_m") = 1.03);

    // ---- sweeps ----------------------------------------------------------------------

    py::class_<SweepGrid>(m, "SweepGrid")
        .def(py::init<>())
        .def(py::init([](std::vector<double> f, std::vector<double> a, std::vector<double> s) {
                 return SweepGrid{std::move(f), std::move(a), std::move(s)};
             }),
             py::arg("focal_points"), py::arg("amplitudes"), py::arg("spot_sizes"))
        .def_readwrite("focal_points", &SweepGrid::focal_points)
        .def_readwrite("amplitudes", &SweepGrid::amplitudes)
        .def_readwrite("spot_sizes", &SweepGrid::spot_sizes);

    m.def("linear_axis", &linear_axis, py::arg("start"), py::arg("stop"), py::arg("step"));
    m.def("log_axis", &log_axis, py::arg("center"), py::arg("decades"), py::arg("count"));
    m.def("a_priori_amplitude", &a_priori_amplitude, py::arg("scenario"), py::arg("spot_size_m"));
    m.def("default_grid", &default_grid, py::arg("scenario"), py::arg("spot_sizes") = std::vector<double>{});

    py::class_<PopulationMap>(m, "PopulationMap")
        .def_property_readonly("focal_points", [](const PopulationMap& p) { return to_array(p.focal_points); })
        .def_property_readonly("amplitudes", [](const PopulationMap& p) { return to_array(p.amplitudes); })
        .def_property_readonly("spot_sizes", [](const PopulationMap& p) { return to_array(p.spot_sizes); })
        .def_property_readonly("qubit_positions", [](const PopulationMap& p) { return to_array(p.qubit_positions); })
        .def_property_readonly("pg", [](const PopulationMap& p) { return shaped(p, p.pg); },
                               "shape (spot, focal, amplitude, qubit)")
        .def_property_readonly("pe", [](const PopulationMap& p) { return shaped(p, p.pe); })
        .def_property_readonly("pf", [](const PopulationMap& p) { return shaped(p, p.pf); })
        .def_property_readonly("leak", [](const PopulationMap& p) { return shaped(p, p.leak); })
        .def("ground_row", [](const PopulationMap& p, std::size_t s, std::size_t a, std::size_t q) {
            return to_array(p.ground_row(s, a, q));
        })
        .def("to_csv", [](const PopulationMap& p) {
            std::ostringstream out;
            write_population_map_csv(out, p);
            return out.str();
        });

    m.def(
        "sweep_focal_amplitude",
        [](const Scenario& sc, const SweepGrid& grid, unsigned workers) {
            return sweep_focal_amplitude(sc, grid, {workers});
        },
        py::arg("scenario"), py::arg("grid"), py::arg("workers") = 0, py::call_guard<py::gil_scoped_release>());

    py::class_<OptimalAmplitude>(m, "OptimalAmplitude")
        .def_readonly("index", &OptimalAmplitude::index)
        .def_readonly("amplitude", &OptimalAmplitude::amplitude)
        .def_readonly("contrast", &OptimalAmplitude::contrast);

    m.def("contrast", &contrast, py::arg("map"), py::arg("spot"), py::arg("amplitude"), py::arg("qubit"),
          py::arg("exclusion_half_width") = 0.1);
    m.def("optimal_amplitude", &optimal_amplitude, py::arg("map"), py::arg("spot") = 0, py::arg("qubit") = 0,
          py::arg("exclusion_half_width") = 0.1);

    py::class_<Revival>(m, "Revival")
        .def_readonly("width", &Revival::width)
        .def_readonly("baseline", &Revival::baseline)
        .def_readonly("peak", &Revival::peak)
        .def_readonly("peak_position", &Revival::peak_position);

    m.def(
        "fit_revival",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> z,
           py::array_t<double, py::array::c_style | py::array::forcecast> pg) {
            return fit_revival(as_vector(z), as_vector(pg));
        },
        py::arg("focal_points"), py::arg("ground"));
    m.def(
        "spatial_resolution",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> z,
           py::array_t<double, py::array::c_style | py::array::forcecast> pg) {
            return spatial_resolution(as_vector(z), as_vector(pg));
        },
        py::arg("focal_points"), py::arg("ground"));

    py::class_<ResolutionPoint>(m, "ResolutionPoint")
        .def_readonly("spot_size_m", &ResolutionPoint::spot_size_m)
        .def_readonly("sigma_q_m", &ResolutionPoint::sigma_q_m)
        .def_readonly("amplitude", &ResolutionPoint::amplitude)
        .def_readonly("contrast", &ResolutionPoint::contrast);
    py::class_<ResolutionStudy>(m, "ResolutionStudy")
        .def_readonly("points", &ResolutionStudy::points)
        .def_readonly("maps", &ResolutionStudy::maps);

    m.def(
        "resolution_curve",
        [](const Scenario& sc, std::vector<double> spots, std::vector<double> focal, std::size_t qubit,
           std::size_t count, double decades, unsigned workers) {
            return resolution_curve(sc, spots, focal, qubit, count, decades, {workers});
        },
        py::arg("scenario"), py::arg("spot_sizes"), py::arg("focal_points"), py::arg("qubit") = 0,
        py::arg("amplitude_count") = 21, py::arg("decades") = 1.5, py::arg("workers") = 0,
        py::call_guard<py::gil_scoped_release>());

    py::class_<ReflectionStudy>(m, "ReflectionStudy")
        .def_readonly("reflection_amplitudes", &ReflectionStudy::reflection_amplitudes)
        .def_readonly("maps", &ReflectionStudy::maps)
        .def_readonly("optima", &ReflectionStudy::optima)
        .def_readonly("distortion", &ReflectionStudy::distortion)
        .def_readonly("distortion_reoptimized", &ReflectionStudy::distortion_reoptimized);

    m.def(
        "reflection_study",
        [](const Scenario& sc, std::size_t qubit, double point, int phase, std::vector<double> rs,
           const SweepGrid& grid, unsigned workers) {
            return reflection_study(sc, qubit, point, phase, rs, grid, {workers});
        },
        py::arg("scenario"), py::arg("qubit"), py::arg("reflection_point_m"), py::arg("phase"),
        py::arg("reflection_amplitudes"), py::arg("grid"), py::arg("workers") = 0,
        py::call_guard<py::gil_scoped_release>());

    m.def("reflection_amplitude_from_power_percent", &reflection_amplitude_from_power_percent);
    m.def("reflection_amplitude_from_return_loss_db", &reflection_amplitude_from_return_loss_db);

    // ---- configuration -------------------------------------------------------------

    py::class_<Config>(m, "Config")
        .def(py::init<>())
        .def("validate", &Config::validate)
        .def("scenario", &Config::scenario)
        .def("focal_grid", &Config::focal_grid)
        .def("__eq__", [](const Config& a, const Config& b) { return a == b; })
        .def("to_toml", [](const Config& c) { return serialize_config(c); });

    m.def("parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));
    m.def("load_config", &load_config, py::arg("path"));

    m.def(
        "run_invariant_checks",
        [](const Config& c) {
            py::list out;
            for (const auto& r : run_invariant_checks(c)) {
                py::dict d;
                d["name"] = r.name;
                d["passed"] = r.passed;
                d["value"] = r.value;
                d["tolerance"] = r.tolerance;
                d["detail"] = r.detail;
                out.append(d);
            }
            return out;
        },
        py::arg("config") = Config{});
}
