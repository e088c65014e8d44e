#include "wgfocus/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "wgfocus/detail/format.hpp"
#include "wgfocus/detail/parallel.hpp"
#include "wgfocus/errors.hpp"
#include "wgfocus/units.hpp"

namespace wgfocus {

using detail::format_double;
using cplx = std::complex<double>;

std::string to_string(EvolutionModel model) {
    return model == EvolutionModel::rwa ? "rwa" : "lab_frame";
}

EvolutionModel parse_evolution_model(const std::string& text) {
    if (text == "rwa") return EvolutionModel::rwa;
    if (text == "lab_frame") return EvolutionModel::lab_frame;
    throw ConfigError("unknown evolution model '" + text + "' (expected rwa or lab_frame)");
}

// ---- scenario ---------------------------------------------------------------

PulseSpec Scenario::pulse(double focal_point, double spot_size) const {
    auto spec = PulseSpec::centered_at(dispersion(), central_frequency, spot_size, focal_point);
    spec.amplitude = field_amplitude;
    spec.highpass_coefficient = highpass_coefficient;
    spec.highpass_enabled = highpass_enabled;
    return spec;
}

void Scenario::validate() const {
    waveguide.validate();
    const auto model = dispersion();
    if (!(central_frequency > model.cutoff_angular_frequency())) {
        throw EvanescentFrequencyError("central frequency " +
                                       format_double(units::angular_to_ghz(central_frequency)) +
                                       " GHz is below the guide cutoff " +
                                       format_double(units::angular_to_ghz(model.cutoff_angular_frequency())) +
                                       " GHz");
    }
    pulse().validate();
    for (std::size_t q = 0; q < qubits.size(); ++q) {
        const auto& site = qubits[q];
        site.transmon.validate();
        const double z = site.transmon.position_m;
        if (z < 0.0 || z > waveguide.length_m) {
            throw ConfigError("qubit " + std::to_string(q + 1) + " at " + format_double(z) +
                              " m lies outside the guide [0, " + format_double(waveguide.length_m) +
                              "] m");
        }
        if (site.reflection) {
            site.reflection->validate();
            if (!(z < site.reflection->point_m)) {
                throw ConfigError("qubit " + std::to_string(q + 1) +
                                  " must lie upstream of its reflection point");
            }
        }
    }
}

namespace {

TransmonSpec default_transmon(double ghz, double z) {
    TransmonSpec t;
    t.transition_frequency = units::ghz_to_angular(ghz);
    t.anharmonicity = units::mhz_to_angular(420.0);
    t.level_count = 5;
    t.dipole_scale = 0.0;
    t.position_m = z;
    return t;
}

}  // namespace

Scenario Scenario::single_qubit() {
    Scenario s;
    s.name = "single";
    s.central_frequency = units::ghz_to_angular(7.2);
    s.qubits = {QubitSite{default_transmon(7.2, 0.15), std::nullopt}};
    return s;
}

Scenario Scenario::two_qubit() {
    Scenario s;
    s.name = "two_qubit";
    s.central_frequency = units::ghz_to_angular(7.28);
    s.qubits = {QubitSite{default_transmon(7.28, 0.15), std::nullopt},
                QubitSite{default_transmon(7.28, 0.20), std::nullopt}};
    return s;
}

// ---- axes -------------------------------------------------------------------

namespace {

void check_increasing(const std::vector<double>& v, const char* what) {
    if (v.empty()) throw ConfigError(std::string("sweep axis '") + what + "' is empty");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) throw ConfigError(std::string("sweep axis '") + what + "' has a non-finite entry");
        if (i > 0 && !(v[i] > v[i - 1])) {
            throw ConfigError(std::string("sweep axis '") + what + "' must be strictly increasing");
        }
    }
}

}  // namespace

void SweepGrid::validate() const {
    check_increasing(focal_points, "focal_points");
    check_increasing(amplitudes, "amplitudes");
    check_increasing(spot_sizes, "spot_sizes");
    if (amplitudes.front() < 0.0) throw ConfigError("amplitudes must be non-negative");
    if (!(spot_sizes.front() > 0.0)) throw ConfigError("spot sizes must be positive");
}

std::vector<double> linear_axis(double start, double stop, double step) {
    if (!(step > 0.0) || !(stop >= start)) throw ConfigError("linear axis needs step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5)) + 1;
    std::vector<double> axis(count);
    for (std::size_t i = 0; i < count; ++i) axis[i] = start + static_cast<double>(i) * step;
    return axis;
}

std::vector<double> log_axis(double center, double decades, std::size_t count) {
    if (!(center > 0.0) || !(decades >= 0.0) || count == 0) {
        throw ConfigError("log axis needs center > 0, decades >= 0 and count >= 1");
    }
    std::vector<double> axis(count);
    if (count == 1) {
        axis[0] = center;
        return axis;
    }
    for (std::size_t i = 0; i < count; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(count - 1) - 0.5;
        axis[i] = center * std::pow(10.0, decades * u);
    }
    return axis;
}

namespace {

// Sweeps normalise the focal envelope to 1 so that the amplitude axis is the
// peak Rabi rate E0 * d_eg.
PulseSpec unit_pulse(const Scenario& scenario, double spot_size) {
    auto spec = scenario.pulse(0.0, spot_size);
    spec.amplitude = 1.0;
    return spec;
}

std::vector<double> abs_values(const std::vector<cplx>& v) {
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](cplx c) { return std::abs(c); });
    return out;
}

}  // namespace

double a_priori_amplitude(const Scenario& scenario, double spot_size_m) {
    const auto model = scenario.dispersion();
    const auto spec = unit_pulse(scenario, spot_size_m);
    const double zero = 0.0;
    const auto grid = plan_time_grid(spec, model, std::span<const double>(&zero, 1));
    const FieldSynthesizer synth(spec, model, grid);
    const auto env = abs_values(synth.analytic_displaced(0.0));
    const double area = std::accumulate(env.begin(), env.end(), 0.0) * grid.step;
    return units::kTwoPi / area;
}

SweepGrid default_grid(const Scenario& scenario, std::vector<double> spot_sizes) {
    if (spot_sizes.empty()) spot_sizes = {scenario.spot_size_m};
    SweepGrid grid;
    grid.focal_points = linear_axis(0.0, 0.4, 0.005);
    grid.amplitudes = log_axis(a_priori_amplitude(scenario, spot_sizes.front()), 1.5, 21);
    grid.spot_sizes = std::move(spot_sizes);
    return grid;
}

std::vector<double> PopulationMap::ground_row(std::size_t spot, std::size_t amp,
                                              std::size_t qubit) const {
    std::vector<double> row(focal_points.size());
    for (std::size_t f = 0; f < row.size(); ++f) row[f] = pg.at(index(spot, f, amp, qubit));
    return row;
}

// ---- sweep engine -----------------------------------------------------------

namespace {

[[noreturn]] void rethrow_with_context(const std::string& where) {
    try {
        throw;
    } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError(where + ": " + e.what());
    } catch (const IoError& e) {
        throw IoError(where + ": " + e.what());
    } catch (const std::exception& e) {
        throw Error(where + ": " + e.what());
    }
}

TimeGrid plan_sweep_grid(const PulseSpec& spec, const DispersionModel& model, const Scenario& scenario,
                         const std::vector<double>& focal_points) {
    // The synthesizer is built with d_f = 0, so positions are displacements.
    std::vector<double> dz;
    for (const auto& site : scenario.qubits) {
        std::vector<double> z = {site.transmon.position_m};
        if (site.reflection && site.reflection->amplitude != 0.0) {
            z.push_back(image_position(site.transmon.position_m, *site.reflection));
        }
        for (double zq : z) {
            dz.push_back(zq - focal_points.front());
            dz.push_back(zq - focal_points.back());
        }
    }
    return plan_time_grid(spec, model, dz);
}

std::vector<cplx> field_at_qubit(const FieldSynthesizer& synth, const QubitSite& site, double d_f) {
    const double z = site.transmon.position_m;
    auto values = synth.checked_analytic_displaced(z - d_f);
    if (site.reflection && site.reflection->amplitude != 0.0) {
        const auto echo = synth.checked_analytic_displaced(image_position(z, *site.reflection) - d_f);
        const double r = site.reflection->amplitude * site.reflection->phase;
        for (std::size_t i = 0; i < values.size(); ++i) values[i] += r * echo[i];
    }
    return values;
}

struct Terminal {
    double pg, pe, pf, leak;
};

Terminal evolve_point(EvolutionModel model, const TransmonSpec& transmon, const AnalyticSignal& signal,
                      const SampledWaveform& field) {
    EvolutionOptions opts;
    opts.record_stride = 0;
    EvolutionResult r;
    if (model == EvolutionModel::rwa) {
        r = evolve_rwa(drive_signals(signal, transmon), QuantumState::ground(2), opts);
    } else {
        r = evolve_lab_frame(transmon, field, QuantumState::ground(transmon.level_count), opts);
    }
    const double sum = r.pg + r.pe + r.pf + r.leakage;
    if (!(std::abs(sum - 1.0) <= 1e-6)) {
        throw NumericError("population closure violated: sum = " + format_double(sum));
    }
    return {r.pg, r.pe, r.pf, r.leakage};
}

}  // namespace

PopulationMap sweep_focal_amplitude(const Scenario& scenario, const SweepGrid& grid,
                                    const SweepOptions& options) {
    scenario.validate();
    grid.validate();
    if (scenario.qubits.empty()) throw ConfigError("scenario has no qubits");

    PopulationMap map;
    map.focal_points = grid.focal_points;
    map.amplitudes = grid.amplitudes;
    map.spot_sizes = grid.spot_sizes;
    map.qubit_count = scenario.qubits.size();
    for (const auto& site : scenario.qubits) map.qubit_positions.push_back(site.transmon.position_m);
    map.pg.assign(map.size(), 0.0);
    map.pe.assign(map.size(), 0.0);
    map.pf.assign(map.size(), 0.0);
    map.leak.assign(map.size(), 0.0);

    const auto model = scenario.dispersion();
    const std::size_t nf = grid.focal_points.size();
    for (std::size_t s = 0; s < grid.spot_sizes.size(); ++s) {
        const double spot = grid.spot_sizes[s];
        std::optional<FieldSynthesizer> synth;
        try {
            const auto spec = unit_pulse(scenario, spot);
            synth.emplace(spec, model, plan_sweep_grid(spec, model, scenario, grid.focal_points));
        } catch (...) {
            rethrow_with_context("sigma_f = " + format_double(spot) + " m");
        }
        const TimeGrid& tg = synth->grid();

        detail::parallel_for(nf, options.workers, [&](std::size_t f) {
            const double d_f = grid.focal_points[f];
            for (std::size_t q = 0; q < map.qubit_count; ++q) {
                const auto& site = scenario.qubits[q];
                std::size_t a = 0;
                try {
                    auto values = field_at_qubit(*synth, site, d_f);
                    SampledWaveform field{tg.start, tg.step, {}, site.transmon.position_m};
                    if (scenario.model == EvolutionModel::lab_frame) {
                        field.samples.resize(values.size());
                        for (std::size_t i = 0; i < values.size(); ++i) field.samples[i] = values[i].real();
                    }
                    const auto signal = make_analytic_signal(tg.start, tg.step, std::move(values));
                    for (a = 0; a < grid.amplitudes.size(); ++a) {
                        TransmonSpec transmon = site.transmon;
                        transmon.dipole_scale = grid.amplitudes[a];
                        const auto t = evolve_point(scenario.model, transmon, signal, field);
                        const std::size_t idx = map.index(s, f, a, q);
                        map.pg[idx] = t.pg;
                        map.pe[idx] = t.pe;
                        map.pf[idx] = t.pf;
                        map.leak[idx] = t.leak;
                    }
                } catch (...) {
                    std::string where = "sweep point sigma_f = " + format_double(spot) +
                                        " m, d_f = " + format_double(d_f) + " m, qubit " +
                                        std::to_string(q + 1);
                    if (a < grid.amplitudes.size()) {
                        where += ", amplitude = " + format_double(grid.amplitudes[a]) + " rad/s";
                    }
                    rethrow_with_context(where);
                }
            }
        });
    }
    return map;
}

// ---- analysis -----------------------------------------------------------------

double contrast(const PopulationMap& map, std::size_t spot, std::size_t amp, std::size_t qubit,
                double exclusion_half_width) {
    const double zq = map.qubit_positions.at(qubit);
    const auto row = map.ground_row(spot, amp, qubit);
    std::size_t nearest = 0;
    for (std::size_t f = 1; f < row.size(); ++f) {
        if (std::abs(map.focal_points[f] - zq) < std::abs(map.focal_points[nearest] - zq)) nearest = f;
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t f = 0; f < row.size(); ++f) {
        if (std::abs(map.focal_points[f] - zq) > exclusion_half_width) {
            sum += row[f];
            ++count;
        }
    }
    if (count == 0) {
        throw ConfigError("contrast: no focal points outside +-" + format_double(exclusion_half_width) +
                          " m of the qubit");
    }
    return row[nearest] - sum / static_cast<double>(count);
}

OptimalAmplitude optimal_amplitude(const PopulationMap& map, std::size_t spot, std::size_t qubit,
                                   double exclusion_half_width) {
    if (map.amplitudes.empty()) throw ConfigError("map has no amplitude axis");
    OptimalAmplitude best;
    best.contrast = 0.0;
    bool found = false;
    for (std::size_t a = 0; a < map.amplitudes.size(); ++a) {
        const double c = contrast(map, spot, a, qubit, exclusion_half_width);
        if (c > best.contrast) {
            best = {a, map.amplitudes[a], c};
            found = true;
        }
    }
    if (!found) throw NumericError("optimal_amplitude: no amplitude gives positive contrast");
    return best;
}

Revival fit_revival(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = y.size();
    if (x.size() != n || n < 8) throw ConfigError("revival fit needs at least 8 matching points");
    const std::size_t q = n / 4;
    std::vector<double> outer(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(q));
    outer.insert(outer.end(), y.end() - static_cast<std::ptrdiff_t>(q), y.end());
    std::sort(outer.begin(), outer.end());
    const std::size_t m = outer.size();
    const double baseline = m % 2 ? outer[m / 2] : 0.5 * (outer[m / 2 - 1] + outer[m / 2]);

    const auto peak_it = std::max_element(y.begin(), y.end());
    const auto p = static_cast<std::size_t>(peak_it - y.begin());
    const double peak = *peak_it;
    if (peak < baseline + 0.1) {
        throw NumericError("no revival: peak " + format_double(peak) + " is not 0.1 above baseline " +
                           format_double(baseline));
    }
    const double half = baseline + 0.5 * (peak - baseline);
    auto cross = [&](std::size_t i, std::size_t j) {
        return x[i] + (half - y[i]) / (y[j] - y[i]) * (x[j] - x[i]);
    };
    std::size_t i = p;
    while (i > 0 && y[i - 1] >= half) --i;
    if (i == 0) throw NumericError("revival does not fall to half height below the peak");
    const double left = cross(i - 1, i);
    std::size_t j = p;
    while (j + 1 < n && y[j + 1] >= half) ++j;
    if (j + 1 == n) throw NumericError("revival does not fall to half height above the peak");
    const double right = cross(j, j + 1);
    return {right - left, baseline, peak, x[p]};
}

double spatial_resolution(std::span<const double> x, std::span<const double> y) {
    return fit_revival(x, y).width;
}

ResolutionStudy resolution_curve(const Scenario& scenario, std::span<const double> spot_sizes,
                                 std::span<const double> focal_points, std::size_t qubit,
                                 std::size_t amplitude_count, double decades,
                                 const SweepOptions& options) {
    if (qubit >= scenario.qubits.size()) throw ConfigError("qubit index out of range");
    Scenario single = scenario;
    single.qubits = {scenario.qubits[qubit]};
    ResolutionStudy study;
    for (double spot : spot_sizes) {
        SweepGrid grid;
        grid.focal_points.assign(focal_points.begin(), focal_points.end());
        grid.spot_sizes = {spot};
        grid.amplitudes = log_axis(a_priori_amplitude(single, spot), decades, amplitude_count);
        auto map = sweep_focal_amplitude(single, grid, options);
        try {
            const auto best = optimal_amplitude(map, 0, 0);
            const auto row = map.ground_row(0, best.index, 0);
            study.points.push_back({spot, spatial_resolution(map.focal_points, row), best.amplitude,
                                    best.contrast});
        } catch (...) {
            rethrow_with_context("sigma_f = " + format_double(spot) + " m");
        }
        study.maps.push_back(std::move(map));
    }
    return study;
}

double l2_distance(std::span<const double> axis, std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() != axis.size() || axis.size() < 2) {
        throw ConfigError("l2_distance: mismatched rows");
    }
    const double step = axis[1] - axis[0];
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(sum * step);
}

ReflectionStudy reflection_study(const Scenario& scenario, std::size_t qubit, double reflection_point_m,
                                 int phase, std::span<const double> reflection_amplitudes,
                                 const SweepGrid& grid, const SweepOptions& options) {
    if (qubit >= scenario.qubits.size()) throw ConfigError("qubit index out of range");
    if (grid.spot_sizes.size() != 1) throw ConfigError("reflection study takes a single spot size");
    if (reflection_amplitudes.empty() || reflection_amplitudes.front() != 0.0) {
        throw ConfigError("reflection study needs r = 0 as its first entry");
    }
    ReflectionStudy study;
    study.reflection_amplitudes.assign(reflection_amplitudes.begin(), reflection_amplitudes.end());
    for (double r : reflection_amplitudes) {
        Scenario single = scenario;
        QubitSite site = scenario.qubits[qubit];
        site.reflection = ReflectionSpec{r, reflection_point_m, phase};
        single.qubits = {site};
        auto map = sweep_focal_amplitude(single, grid, options);
        study.optima.push_back(optimal_amplitude(map, 0, 0));
        study.maps.push_back(std::move(map));
    }
    const std::size_t ref_amp = study.optima.front().index;
    const auto reference = study.maps.front().ground_row(0, ref_amp, 0);
    for (std::size_t i = 0; i < study.maps.size(); ++i) {
        const auto fixed = study.maps[i].ground_row(0, ref_amp, 0);
        const auto own = study.maps[i].ground_row(0, study.optima[i].index, 0);
        study.distortion.push_back(l2_distance(grid.focal_points, fixed, reference));
        study.distortion_reoptimized.push_back(l2_distance(grid.focal_points, own, reference));
    }
    return study;
}

CompressionReport compression_experiment(const Scenario& scenario, double length_m) {
    if (!(length_m > 0.0)) throw ConfigError("propagation length must be positive");
    const auto model = scenario.dispersion();
    const auto spec = scenario.pulse(length_m, scenario.spot_size_m);
    const std::vector<double> positions = {0.0, length_m};
    CompressionReport report;
    report.length_m = length_m;
    report.grid = plan_time_grid(spec, model, positions);
    const FieldSynthesizer synth(spec, model, report.grid);
    const auto input = abs_values(synth.checked_analytic_displaced(-length_m));
    const auto focal = abs_values(synth.checked_analytic_displaced(0.0));
    report.input_fwhm_s = fwhm(report.grid.start, report.grid.step, input);
    report.focal_fwhm_s = fwhm(report.grid.start, report.grid.step, focal);
    report.ratio = report.input_fwhm_s / report.focal_fwhm_s;
    return report;
}

// ---- output -------------------------------------------------------------------

void write_population_map_csv(std::ostream& out, const PopulationMap& map, bool header) {
    if (header) out << "d_f_m,amplitude,sigma_f_m,qubit,pg,pe,pf,leak\n";
    for (std::size_t s = 0; s < map.spot_sizes.size(); ++s) {
        for (std::size_t f = 0; f < map.focal_points.size(); ++f) {
            for (std::size_t a = 0; a < map.amplitudes.size(); ++a) {
                for (std::size_t q = 0; q < map.qubit_count; ++q) {
                    const std::size_t i = map.index(s, f, a, q);
                    out << format_double(map.focal_points[f]) << ',' << format_double(map.amplitudes[a])
                        << ',' << format_double(map.spot_sizes[s]) << ',' << (q + 1) << ','
                        << format_double(map.pg[i]) << ',' << format_double(map.pe[i]) << ','
                        << format_double(map.pf[i]) << ',' << format_double(map.leak[i]) << '\n';
                }
            }
        }
    }
}

void write_resolution_csv(std::ostream& out, std::span<const ResolutionPoint> points) {
    out << "sigma_f_m,sigma_q_m\n";
    for (const auto& p : points) {
        out << format_double(p.spot_size_m) << ',' << format_double(p.sigma_q_m) << '\n';
    }
}

}  // namespace wgfocus
