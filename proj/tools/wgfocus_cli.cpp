// wgfocus command-line front end.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wgfocus/config.hpp"
#include "wgfocus/detail/format.hpp"
#include "wgfocus/errors.hpp"
#include "wgfocus/experiments.hpp"
#include "wgfocus/units.hpp"
#include "wgfocus/validation.hpp"
#include "wgfocus/version.hpp"
#include "wgfocus/waveform_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using wgfocus::detail::format_double;

namespace {

constexpr const char* kOutputEnv = "WGFOCUS_OUTPUT_DIR";

struct Common {
    std::string config_path;
    std::string output_dir;
    std::string manifest_path;
    std::string name;
    int workers = -1;
};

// Per-subcommand options. Every field is recorded in the manifest.
struct Options {
    std::optional<double> position_m;
    std::optional<double> focal_point_m;
    std::optional<double> distance_m;
    std::optional<double> length_m;
    std::optional<double> rate_hz;
    std::optional<double> amplitude_hz;
    std::optional<int> qubit;
    std::string input;
    std::string format = "text";
    bool direct = false;
};

json options_to_json(const Options& o) {
    json j = json::object();
    auto put = [&](const char* key, const auto& v) {
        if (v) j[key] = *v;
    };
    put("position_m", o.position_m);
    put("focal_point_m", o.focal_point_m);
    put("distance_m", o.distance_m);
    put("length_m", o.length_m);
    put("rate_hz", o.rate_hz);
    put("amplitude_hz", o.amplitude_hz);
    put("qubit", o.qubit);
    if (!o.input.empty()) j["input"] = o.input;
    j["format"] = o.format;
    j["direct"] = o.direct;
    return j;
}

Options options_from_json(const json& j) {
    Options o;
    auto get = [&](const char* key, auto& v) {
        if (j.contains(key)) v = j.at(key).get<typename std::decay_t<decltype(v)>::value_type>();
    };
    get("position_m", o.position_m);
    get("focal_point_m", o.focal_point_m);
    get("distance_m", o.distance_m);
    get("length_m", o.length_m);
    get("rate_hz", o.rate_hz);
    get("amplitude_hz", o.amplitude_hz);
    get("qubit", o.qubit);
    o.input = j.value("input", std::string{});
    o.format = j.value("format", std::string{"text"});
    o.direct = j.value("direct", false);
    return o;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Writes products into one directory; file names are checked so nothing
/// lands outside it.
class Output {
public:
    explicit Output(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw wgfocus::IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    fs::path path(const std::string& file) {
        if (!wgfocus::is_safe_name(file)) throw wgfocus::IoError("refusing unsafe output name '" + file + "'");
        products_.push_back(file);
        return dir_ / file;
    }

    std::ofstream open(const std::string& file) {
        std::ofstream out(path(file), std::ios::binary);
        if (!out) throw wgfocus::IoError("cannot write " + (dir_ / file).string());
        return out;
    }

    void text(const std::string& file, const std::string& content) {
        auto out = open(file);
        out << content;
        if (!out) throw wgfocus::IoError("failed writing " + (dir_ / file).string());
    }

    const fs::path& dir() const { return dir_; }
    const std::vector<std::string>& products() const { return products_; }

private:
    fs::path dir_;
    std::vector<std::string> products_;
};

struct Context {
    std::string command;
    wgfocus::Config config;
    Options options;
    unsigned workers = 1;
    json derived = json::object();
    json results = json::object();
};

wgfocus::WaveformFormat parse_format(const std::string& text) {
    if (text == "text") return wgfocus::WaveformFormat::text;
    if (text == "binary") return wgfocus::WaveformFormat::binary;
    throw wgfocus::ConfigError("unknown waveform format '" + text + "' (expected text or binary)");
}

std::string waveform_file(const std::string& stem, const Context& ctx) {
    return stem + "_" + ctx.config.run.name + (ctx.options.format == "binary" ? ".bin" : ".txt");
}

void add_scenario_constants(Context& ctx) {
    const auto sc = ctx.config.scenario();
    const auto model = sc.dispersion();
    const double w0 = sc.central_frequency;
    ctx.derived["cutoff_ghz"] = wgfocus::units::angular_to_ghz(model.cutoff_angular_frequency());
    ctx.derived["central_wavevector_rad_per_m"] = model.k_of_omega(w0);
    ctx.derived["group_velocity_m_per_s"] = model.group_velocity(w0);
    ctx.derived["guide_wavelength_m"] = model.guide_wavelength(w0);
}

// ---- subcommands --------------------------------------------------------------

void cmd_synth(Context& ctx, Output& out) {
    const auto sc = ctx.config.scenario();
    const auto model = sc.dispersion();
    auto spec = sc.pulse();
    if (ctx.options.focal_point_m) spec.focal_point_m = *ctx.options.focal_point_m;
    const double z = ctx.options.position_m.value_or(spec.focal_point_m);
    const auto grid = wgfocus::plan_time_grid(spec, model, std::span<const double>(&z, 1));
    const auto wave = ctx.options.direct ? wgfocus::synthesize_direct(spec, model, grid, z)
                                         : wgfocus::field_at_position(spec, model, z, grid);
    wgfocus::write_waveform(out.path(waveform_file("waveform", ctx)), wave, parse_format(ctx.options.format));
    {
        auto csv = out.open("spectrum_" + ctx.config.run.name + ".csv");
        wgfocus::write_spectrum_csv(csv, wgfocus::spectral_profile(spec, model), model);
    }
    const auto signal = wgfocus::analytic_signal(wave);
    const auto peak = std::max_element(signal.envelope.begin(), signal.envelope.end()) - signal.envelope.begin();
    ctx.results["position_m"] = z;
    ctx.results["focal_point_m"] = spec.focal_point_m;
    ctx.results["samples"] = wave.samples.size();
    ctx.results["sample_period_s"] = wave.sample_period;
    ctx.results["envelope_peak"] = signal.envelope[static_cast<std::size_t>(peak)];
    ctx.results["envelope_peak_time_ns"] = signal.start_time * 1e9 + static_cast<double>(peak) * signal.sample_period * 1e9;
    std::cout << "envelope peak " << format_double(ctx.results["envelope_peak"].get<double>()) << " at t = "
              << format_double(ctx.results["envelope_peak_time_ns"].get<double>()) << " ns\n";
}

void cmd_propagate(Context& ctx, Output& out) {
    if (ctx.options.input.empty()) throw wgfocus::ConfigError("propagate needs --input");
    if (!ctx.options.distance_m) throw wgfocus::ConfigError("propagate needs --distance-m");
    const auto model = ctx.config.scenario().dispersion();
    const auto wave = wgfocus::read_waveform(fs::path(ctx.options.input));
    const auto moved = wgfocus::propagate(wave, model, *ctx.options.distance_m);
    wgfocus::write_waveform(out.path(waveform_file("propagated", ctx)), moved, parse_format(ctx.options.format));
    ctx.results["input_energy"] = wave.energy();
    ctx.results["output_energy"] = moved.energy();
}

void cmd_compress(Context& ctx, Output& out) {
    const auto sc = ctx.config.scenario();
    const double length = ctx.options.length_m.value_or(ctx.config.run.compress_length_m);
    const auto report = wgfocus::compression_experiment(sc, length);
    const auto model = sc.dispersion();
    const wgfocus::FieldSynthesizer synth(sc.pulse(length, sc.spot_size_m), model, report.grid);
    const auto input = synth.analytic_signal_at(0.0);
    const auto focal = synth.analytic_signal_at(length);
    {
        auto csv = out.open("compress_" + ctx.config.run.name + ".csv");
        csv << "t_ns,input,input_envelope,focal,focal_envelope\n";
        for (std::size_t i = 0; i < input.size(); ++i) {
            csv << format_double((report.grid.start + static_cast<double>(i) * report.grid.step) * 1e9) << ','
                << format_double(input.values[i].real()) << ',' << format_double(input.envelope[i]) << ','
                << format_double(focal.values[i].real()) << ',' << format_double(focal.envelope[i]) << '\n';
        }
    }
    json j;
    j["length_m"] = report.length_m;
    j["input_fwhm_ns"] = report.input_fwhm_s * 1e9;
    j["focal_fwhm_ns"] = report.focal_fwhm_s * 1e9;
    j["ratio"] = report.ratio;
    out.text("compress_" + ctx.config.run.name + ".json", j.dump(2) + "\n");
    ctx.results = j;
    std::cout << "input FWHM " << format_double(report.input_fwhm_s * 1e9) << " ns, focal FWHM "
              << format_double(report.focal_fwhm_s * 1e9) << " ns, ratio " << format_double(report.ratio) << '\n';
}

void record_optima(Context& ctx, const wgfocus::PopulationMap& map, std::size_t spot) {
    json optima = json::array();
    for (std::size_t q = 0; q < map.qubit_count; ++q) {
        json entry;
        entry["qubit"] = q + 1;
        try {
            const auto best = wgfocus::optimal_amplitude(map, spot, q, ctx.config.sweep.exclusion_half_width_m);
            entry["optimal_amplitude_rad_per_s"] = best.amplitude;
            entry["contrast"] = best.contrast;
            const auto row = map.ground_row(spot, best.index, q);
            try {
                entry["sigma_q_m"] = wgfocus::spatial_resolution(map.focal_points, row);
            } catch (const wgfocus::NumericError& e) {
                entry["sigma_q_m"] = nullptr;
                entry["sigma_q_error"] = e.what();
            }
        } catch (const wgfocus::NumericError& e) {
            entry["error"] = e.what();
        }
        optima.push_back(entry);
    }
    ctx.results["optima"] = optima;
}

void cmd_sweep_focal(Context& ctx, Output& out) {
    const auto sc = ctx.config.scenario();
    const auto grid = ctx.config.focal_grid();
    const auto map = wgfocus::sweep_focal_amplitude(sc, grid, {ctx.workers});
    {
        auto csv = out.open("map_" + ctx.config.run.name + ".csv");
        wgfocus::write_population_map_csv(csv, map);
    }
    record_optima(ctx, map, 0);
    std::cout << ctx.results["optima"].dump() << '\n';
}

wgfocus::ResolutionStudy run_resolution(Context& ctx) {
    const auto sc = ctx.config.scenario();
    const int qubit = ctx.options.qubit.value_or(ctx.config.sweep.qubit);
    if (qubit < 1 || static_cast<std::size_t>(qubit) > sc.qubits.size()) {
        throw wgfocus::ConfigError("--qubit must name an existing qubit");
    }
    const double zq = sc.qubits[static_cast<std::size_t>(qubit - 1)].transmon.position_m;
    const double half = ctx.config.sweep.resolution_half_range_m;
    const auto focal = wgfocus::linear_axis(zq - half, zq + half, ctx.config.sweep.focal_step_m);
    ctx.results["qubit"] = qubit;
    return wgfocus::resolution_curve(sc, ctx.config.sweep.spot_sizes_m, focal, static_cast<std::size_t>(qubit - 1),
                                     static_cast<std::size_t>(ctx.config.sweep.amplitude_count),
                                     ctx.config.sweep.amplitude_decades, {ctx.workers});
}

void write_resolution(Context& ctx, Output& out, const wgfocus::ResolutionStudy& study) {
    {
        auto csv = out.open("resolution_" + ctx.config.run.name + ".csv");
        wgfocus::write_resolution_csv(csv, study.points);
    }
    json points = json::array();
    for (const auto& p : study.points) {
        points.push_back({{"sigma_f_m", p.spot_size_m}, {"sigma_q_m", p.sigma_q_m},
                          {"optimal_amplitude_rad_per_s", p.amplitude}, {"contrast", p.contrast}});
        std::cout << "sigma_f " << format_double(p.spot_size_m) << " m -> sigma_q " << format_double(p.sigma_q_m)
                  << " m\n";
    }
    ctx.results["points"] = points;
}

void cmd_sweep_spot(Context& ctx, Output& out) {
    const auto study = run_resolution(ctx);
    {
        auto csv = out.open("map_" + ctx.config.run.name + ".csv");
        for (std::size_t i = 0; i < study.maps.size(); ++i) {
            wgfocus::write_population_map_csv(csv, study.maps[i], i == 0);
        }
    }
    write_resolution(ctx, out, study);
}

void cmd_resolution(Context& ctx, Output& out) { write_resolution(ctx, out, run_resolution(ctx)); }

void cmd_reflections(Context& ctx, Output& out) {
    auto sc = ctx.config.scenario();
    for (auto& site : sc.qubits) site.reflection.reset();
    const auto& refl = ctx.config.reflection;
    const auto grid = ctx.config.focal_grid();
    const auto& rs = ctx.config.sweep.reflection_amplitudes;

    std::vector<std::size_t> targets;
    for (std::size_t q = 0; q < sc.qubits.size(); ++q) {
        const int label = static_cast<int>(q) + 1;
        const bool listed = refl.qubits.empty() ||
                            std::find(refl.qubits.begin(), refl.qubits.end(), label) != refl.qubits.end();
        if (listed) targets.push_back(q);
    }

    std::vector<wgfocus::ReflectionStudy> studies;
    for (std::size_t q : targets) {
        studies.push_back(wgfocus::reflection_study(sc, q, refl.point_m, refl.phase, rs, grid, {ctx.workers}));
    }
    for (std::size_t i = 0; i < rs.size(); ++i) {
        auto csv = out.open("map_" + ctx.config.run.name + "_r" + std::to_string(i) + ".csv");
        csv << "d_f_m,amplitude,sigma_f_m,qubit,pg,pe,pf,leak\n";
        for (std::size_t t = 0; t < targets.size(); ++t) {
            // Relabel the single-qubit maps with their configured qubit number.
            std::ostringstream body;
            wgfocus::write_population_map_csv(body, studies[t].maps[i], false);
            std::istringstream lines(body.str());
            std::string line;
            while (std::getline(lines, line)) {
                std::size_t comma = 0;
                for (int k = 0; k < 3; ++k) comma = line.find(',', comma) + 1;
                const std::size_t end = line.find(',', comma);
                csv << line.substr(0, comma) << (targets[t] + 1) << line.substr(end) << '\n';
            }
        }
    }
    json rows = json::array();
    {
        auto csv = out.open("reflections_" + ctx.config.run.name + ".csv");
        csv << "qubit,standoff_m,r,optimal_amplitude,contrast,distortion,distortion_reoptimized\n";
        for (std::size_t t = 0; t < targets.size(); ++t) {
            const auto& st = studies[t];
            const double standoff = refl.point_m - sc.qubits[targets[t]].transmon.position_m;
            for (std::size_t i = 0; i < rs.size(); ++i) {
                csv << (targets[t] + 1) << ',' << format_double(standoff) << ',' << format_double(rs[i]) << ','
                    << format_double(st.optima[i].amplitude) << ',' << format_double(st.optima[i].contrast) << ','
                    << format_double(st.distortion[i]) << ',' << format_double(st.distortion_reoptimized[i]) << '\n';
                rows.push_back({{"qubit", targets[t] + 1}, {"r", rs[i]}, {"distortion", st.distortion[i]}});
                std::cout << "qubit " << (targets[t] + 1) << " r " << format_double(rs[i]) << " distortion "
                          << format_double(st.distortion[i]) << '\n';
            }
        }
    }
    ctx.results["distortion"] = rows;
}

void cmd_export_awg(Context& ctx, Output& out) {
    const auto sc = ctx.config.scenario();
    const auto model = sc.dispersion();
    const auto spec = sc.pulse();
    const double rate = ctx.options.rate_hz.value_or(ctx.config.run.awg_sample_rate_hz);
    const double zero = 0.0;
    const auto grid = wgfocus::plan_time_grid(spec, model, std::span<const double>(&zero, 1));
    const auto input = wgfocus::field_at_position(spec, model, 0.0, grid);
    const auto awg = wgfocus::resample_for_awg(input, rate);
    wgfocus::write_waveform(out.path(waveform_file("awg", ctx)), awg, parse_format(ctx.options.format));
    ctx.results["sample_rate_hz"] = rate;
    ctx.results["samples"] = awg.samples.size();
    ctx.results["max_frequency_hz"] = wgfocus::max_frequency_content(input);
    std::cout << "wrote " << awg.samples.size() << " samples at " << format_double(rate) << " S/s\n";
}

void cmd_evolve(Context& ctx, Output& out) {
    const auto sc = ctx.config.scenario();
    const int qubit = ctx.options.qubit.value_or(1);
    if (qubit < 1 || static_cast<std::size_t>(qubit) > sc.qubits.size()) {
        throw wgfocus::ConfigError("--qubit must name an existing qubit");
    }
    const auto& site = sc.qubits[static_cast<std::size_t>(qubit - 1)];
    auto spec = sc.pulse();
    spec.amplitude = 1.0;
    if (ctx.options.focal_point_m) spec.focal_point_m = *ctx.options.focal_point_m;
    const auto model = sc.dispersion();
    const double z = site.transmon.position_m;
    std::vector<double> positions = {z};
    if (site.reflection) positions.push_back(wgfocus::image_position(z, *site.reflection));
    const auto grid = wgfocus::plan_time_grid(spec, model, positions);
    const wgfocus::FieldSynthesizer synth(spec, model, grid);
    const auto values = site.reflection ? wgfocus::analytic_with_reflection(synth, z, *site.reflection)
                                        : synth.checked_analytic_displaced(z - spec.focal_point_m);
    wgfocus::TransmonSpec transmon = site.transmon;
    transmon.dipole_scale = ctx.options.amplitude_hz ? wgfocus::units::hz_to_angular(*ctx.options.amplitude_hz)
                                                     : 2.0 * wgfocus::a_priori_amplitude(sc, sc.spot_size_m);
    wgfocus::EvolutionOptions opts;
    opts.record_stride = 4;
    wgfocus::EvolutionResult result;
    if (sc.model == wgfocus::EvolutionModel::rwa) {
        const auto signal = wgfocus::make_analytic_signal(grid.start, grid.step, values);
        result = wgfocus::evolve_rwa(wgfocus::drive_signals(signal, transmon), wgfocus::QuantumState::ground(2), opts);
    } else {
        wgfocus::SampledWaveform field{grid.start, grid.step, std::vector<double>(values.size()), z};
        for (std::size_t i = 0; i < values.size(); ++i) field.samples[i] = values[i].real();
        result = wgfocus::evolve_lab_frame(transmon, field, wgfocus::QuantumState::ground(transmon.level_count), opts);
    }
    {
        auto csv = out.open("evolution_" + ctx.config.run.name + ".csv");
        wgfocus::write_evolution_csv(csv, result);
    }
    out.text("evolution_" + ctx.config.run.name + ".json", wgfocus::evolution_summary_json(result) + "\n");
    ctx.results = json::parse(wgfocus::evolution_summary_json(result));
    ctx.results["dipole_scale_rad_per_s"] = transmon.dipole_scale;
    std::cout << wgfocus::evolution_summary_json(result) << '\n';
}

void cmd_validate(Context& ctx, Output& out) {
    const auto checks = wgfocus::run_invariant_checks(ctx.config);
    json rows = json::array();
    bool ok = true;
    for (const auto& c : checks) {
        ok = ok && c.passed;
        rows.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"tolerance", c.tolerance},
                        {"detail", c.detail}});
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << format_double(c.value)
                  << " tol=" << format_double(c.tolerance) << (c.detail.empty() ? "" : "  " + c.detail) << '\n';
    }
    out.text("validate_" + ctx.config.run.name + ".json", rows.dump(2) + "\n");
    ctx.results["checks"] = rows;
    ctx.results["passed"] = ok;
}

using Handler = void (*)(Context&, Output&);

struct Subcommand {
    const char* name;
    const char* help;
    Handler handler;
};

const Subcommand kSubcommands[] = {
    {"synth", "Synthesize the pulse at a position (default: the focal point)", cmd_synth},
    {"propagate", "Shift an existing waveform along the guide", cmd_propagate},
    {"compress", "Input vs focal envelope width for a long guide", cmd_compress},
    {"sweep-focal", "Focal point x amplitude population map", cmd_sweep_focal},
    {"sweep-spot", "Focal point x spot size maps at the optimal amplitude", cmd_sweep_spot},
    {"resolution", "Spatial resolution versus spot size", cmd_resolution},
    {"reflections", "Population maps and lineshape distortion versus reflection", cmd_reflections},
    {"export-awg", "Resample the input waveform onto an AWG clock", cmd_export_awg},
    {"evolve", "Population trajectory of one qubit for one pulse", cmd_evolve},
    {"validate", "Run the invariant suite", cmd_validate},
};

int execute(const Subcommand& sub, const Common& common, Options options, std::vector<std::string> explicit_opts) {
    Context ctx;
    ctx.command = sub.name;
    std::string manifest_output_dir;
    if (!common.manifest_path.empty()) {
        std::ifstream in(common.manifest_path);
        if (!in) throw wgfocus::IoError("cannot open manifest " + common.manifest_path);
        json manifest;
        try {
            manifest = json::parse(in);
            if (manifest.at("command").get<std::string>() != sub.name) {
                throw wgfocus::ConfigError("manifest was written by '" + manifest.at("command").get<std::string>() +
                                           "', not '" + sub.name + "'");
            }
            ctx.config = wgfocus::parse_config(manifest.at("config_toml").get<std::string>(), common.manifest_path);
            options = options_from_json(manifest.at("options"));
            manifest_output_dir = manifest.at("output_dir").get<std::string>();
        } catch (const json::exception& e) {
            throw wgfocus::ConfigError("malformed manifest " + common.manifest_path + ": " + e.what());
        }
        if (!explicit_opts.empty()) {
            std::cerr << "note: options from the manifest take precedence over --" << explicit_opts.front() << '\n';
        }
    } else if (!common.config_path.empty()) {
        ctx.config = wgfocus::load_config(common.config_path);
    } else {
        ctx.config.validate();
    }
    if (!common.name.empty()) {
        ctx.config.run.name = common.name;
        ctx.config.validate();
    }
    if (common.workers >= 0) ctx.config.run.workers = static_cast<unsigned>(common.workers);
    ctx.options = std::move(options);
    parse_format(ctx.options.format);
    ctx.workers = ctx.config.run.workers;

    std::string dir = ctx.config.run.output_dir;
    if (!manifest_output_dir.empty()) dir = manifest_output_dir;
    if (const char* env = std::getenv(kOutputEnv); env && *env) dir = env;
    if (!common.output_dir.empty()) dir = common.output_dir;
    ctx.config.run.output_dir = dir;

    Output out{fs::path(dir)};
    add_scenario_constants(ctx);
    sub.handler(ctx, out);

    json manifest;
    manifest["tool"] = "wgfocus";
    manifest["version"] = wgfocus::kVersion;
    manifest["command"] = ctx.command;
    manifest["timestamp"] = utc_timestamp();
    manifest["output_dir"] = dir;
    manifest["workers"] = ctx.workers;
    manifest["options"] = options_to_json(ctx.options);
    manifest["config_toml"] = wgfocus::serialize_config(ctx.config);
    manifest["derived"] = ctx.derived;
    manifest["definitions"] = {
        {"amplitude", "peak Rabi rate E0 * d_eg at the focus, rad/s"},
        {"detuning", "literal: H = Delta sigma_z + g/2 sigma_x; rotating_frame: H = Delta/2 sigma_z + g/2 sigma_x"},
        {"optimal_amplitude",
         "argmax of P_g(d_f nearest z_q) - mean P_g(|d_f - z_q| > exclusion_half_width); ties to the lower amplitude"},
        {"sigma_q", "FWHM of P_g(d_f) above the median of its outer quartiles"},
        {"distortion", "L2 distance of P_g(d_f) from the r = 0 row at the r = 0 optimal amplitude, m^0.5"},
    };
    manifest["results"] = ctx.results;
    auto products = out.products();
    manifest["products"] = products;
    out.text("meta_" + ctx.config.run.name + ".json", manifest.dump(2) + "\n");
    if (ctx.command == "validate" && !ctx.results.value("passed", false)) return 3;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-focusing waveguide pulses and position-selective qubit driving"};
    app.set_version_flag("--version", wgfocus::kVersion);
    app.require_subcommand(1);

    Common common;
    Options options;
    std::vector<std::pair<CLI::App*, const Subcommand*>> subs;
    for (const auto& sub : kSubcommands) {
        auto* cmd = app.add_subcommand(sub.name, sub.help);
        cmd->add_option("-c,--config", common.config_path, "Scenario file (TOML)")->check(CLI::ExistingFile);
        cmd->add_option("-o,--output-dir", common.output_dir, "Output directory (overrides $WGFOCUS_OUTPUT_DIR)");
        cmd->add_option("--manifest", common.manifest_path, "Re-run from a meta_<name>.json manifest")
            ->check(CLI::ExistingFile);
        cmd->add_option("--name", common.name, "Run name used in output file names");
        cmd->add_option("-j,--workers", common.workers, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
        cmd->add_option("--format", options.format, "Waveform file format")->check(CLI::IsMember({"text", "binary"}));
        const std::string name = sub.name;
        if (name == "synth") {
            cmd->add_option("--position-m", options.position_m, "Observation position z");
            cmd->add_option("--focal-point-m", options.focal_point_m, "Focal point d_f");
            cmd->add_flag("--direct", options.direct, "Evaluate the k-integral directly instead of by FFT");
        } else if (name == "propagate") {
            cmd->add_option("-i,--input", options.input, "Waveform file")->check(CLI::ExistingFile);
            cmd->add_option("--distance-m", options.distance_m, "Propagation distance (negative: backwards)");
        } else if (name == "compress") {
            cmd->add_option("--length-m", options.length_m, "Guide length to the focus");
        } else if (name == "export-awg") {
            cmd->add_option("--rate-hz", options.rate_hz, "AWG sample rate");
        } else if (name == "evolve") {
            cmd->add_option("--focal-point-m", options.focal_point_m, "Focal point d_f");
            cmd->add_option("--qubit", options.qubit, "Qubit label (1-based)");
            cmd->add_option("--amplitude-hz", options.amplitude_hz, "Peak Rabi frequency at the focus");
        } else if (name == "sweep-spot" || name == "resolution") {
            cmd->add_option("--qubit", options.qubit, "Qubit label (1-based)");
        }
        subs.emplace_back(cmd, &sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    for (const auto& [cmd, sub] : subs) {
        if (!cmd->parsed()) continue;
        std::vector<std::string> explicit_opts;
        for (const char* opt : {"--position-m", "--focal-point-m", "--distance-m", "--length-m", "--rate-hz",
                                "--amplitude-hz", "--qubit", "--input", "--format"}) {
            if (cmd->get_option_no_throw(opt) && cmd->count(opt) > 0) explicit_opts.emplace_back(opt + 2);
        }
        try {
            return execute(*sub, common, options, explicit_opts);
        } catch (const wgfocus::ConfigError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return 2;
        } catch (const wgfocus::NumericError& e) {
            std::cerr << "numeric error: " << e.what() << '\n';
            return 3;
        } catch (const wgfocus::IoError& e) {
            std::cerr << "i/o error: " << e.what() << '\n';
            return 4;
        } catch (const fs::filesystem_error& e) {
            std::cerr << "i/o error: " << e.what() << '\n';
            return 4;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 3;
        }
    }
    return 2;
}
