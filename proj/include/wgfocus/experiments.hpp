#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wgfocus/channel.hpp"
#include "wgfocus/dynamics.hpp"
#include "wgfocus/pulse.hpp"
#include "wgfocus/waveguide.hpp"

namespace wgfocus {

enum class EvolutionModel { rwa, lab_frame };

std::string to_string(EvolutionModel model);
EvolutionModel parse_evolution_model(const std::string& text);

struct QubitSite {
    TransmonSpec transmon;  ///< dipole_scale is replaced by the sweep amplitude
    std::optional<ReflectionSpec> reflection;

    friend bool operator==(const QubitSite&, const QubitSite&) = default;
};

struct Scenario {
    std::string name = "default";
    WaveguideSpec waveguide;
    double central_frequency = 0.0;  ///< rad/s
    double spot_size_m = 0.035;
    double focal_point_m = 0.15;
    double field_amplitude = 1.0;  ///< E0
    double highpass_coefficient = 0.01;
    bool highpass_enabled = true;
    std::vector<QubitSite> qubits;
    EvolutionModel model = EvolutionModel::rwa;

    DispersionModel dispersion() const { return cutoff_from_geometry(waveguide); }
    PulseSpec pulse(double focal_point_m, double spot_size_m) const;
    PulseSpec pulse() const { return pulse(focal_point_m, spot_size_m); }
    void validate() const;

    /// WR90 guide, 7.2 GHz pulse, one transmon at 15 cm (alpha/2pi = 420 MHz).
    static Scenario single_qubit();
    /// Qubits at 15 cm and 20 cm, both tuned to 7.28 GHz.
    static Scenario two_qubit();

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct SweepGrid {
    std::vector<double> focal_points;  ///< d_f, m
    std::vector<double> amplitudes;    ///< peak Rabi rate at the focus, rad/s
    std::vector<double> spot_sizes;    ///< sigma_f, m

    void validate() const;
};

/// start, start + step, ... up to stop (inclusive within half a step).
std::vector<double> linear_axis(double start, double stop, double step);
/// `count` log-spaced values spanning `decades`, geometrically centred on `center`.
std::vector<double> log_axis(double center, double decades, std::size_t count);

/// Peak Rabi rate giving a 2 pi envelope area at the focus. This is where
/// the sweep's amplitude axis is centred.
double a_priori_amplitude(const Scenario& scenario, double spot_size_m);

/// Default axes: d_f in [0, 0.4] m at 5 mm; 21 amplitudes over 1.5 decades
/// around the a-priori optimum of the first spot size.
SweepGrid default_grid(const Scenario& scenario, std::vector<double> spot_sizes);

/// Terminal populations indexed [spot][focal][amplitude][qubit].
struct PopulationMap {
    std::vector<double> focal_points;
    std::vector<double> amplitudes;
    std::vector<double> spot_sizes;
    std::size_t qubit_count = 0;
    std::vector<double> qubit_positions;
    std::vector<double> pg;
    std::vector<double> pe;
    std::vector<double> pf;
    std::vector<double> leak;

    std::size_t index(std::size_t spot, std::size_t focal, std::size_t amp, std::size_t qubit) const {
        return ((spot * focal_points.size() + focal) * amplitudes.size() + amp) * qubit_count + qubit;
    }
    std::size_t size() const {
        return spot_sizes.size() * focal_points.size() * amplitudes.size() * qubit_count;
    }
    /// P|g> versus d_f for one (spot, amplitude, qubit).
    std::vector<double> ground_row(std::size_t spot, std::size_t amp, std::size_t qubit) const;
};

struct SweepOptions {
    unsigned workers = 0;  ///< 0: hardware concurrency
};

/// Every (sigma_f, d_f, amplitude, qubit) point: field at z_q (plus the
/// configured reflection), evolve from the ground state, keep terminal
/// populations. Output order depends only on grid indices.
PopulationMap sweep_focal_amplitude(const Scenario& scenario, const SweepGrid& grid,
                                    const SweepOptions& options = {});

struct OptimalAmplitude {
    std::size_t index = 0;
    double amplitude = 0.0;
    double contrast = 0.0;
};

/// C(a) = P|g>(d_f nearest z_q) - mean P|g> over d_f outside z_q +- half_width.
double contrast(const PopulationMap& map, std::size_t spot, std::size_t amp, std::size_t qubit,
                double exclusion_half_width);

/// Amplitude with the largest contrast; ties go to the lower amplitude.
/// Throws NumericError if no amplitude yields positive contrast.
OptimalAmplitude optimal_amplitude(const PopulationMap& map, std::size_t spot, std::size_t qubit,
                                   double exclusion_half_width = 0.1);

struct Revival {
    double width = 0.0;     ///< sigma_q, m
    double baseline = 0.0;  ///< median of the outer quartiles
    double peak = 0.0;
    double peak_position = 0.0;
};

/// FWHM of P|g>(d_f) above its off-focus baseline around the dominant peak.
/// Throws NumericError when there is no revival (peak < baseline + 0.1) or
/// the half level is not crossed on both sides.
Revival fit_revival(std::span<const double> focal_points, std::span<const double> ground);
double spatial_resolution(std::span<const double> focal_points, std::span<const double> ground);

struct ResolutionPoint {
    double spot_size_m = 0.0;
    double sigma_q_m = 0.0;
    double amplitude = 0.0;
    double contrast = 0.0;
};

struct ResolutionStudy {
    std::vector<ResolutionPoint> points;
    std::vector<PopulationMap> maps;  ///< one per spot size, own amplitude axis
};

/// One sweep per spot size, each with amplitudes centred on its own
/// a-priori optimum; sigma_q is read off the optimal-amplitude row.
ResolutionStudy resolution_curve(const Scenario& scenario, std::span<const double> spot_sizes,
                                 std::span<const double> focal_points, std::size_t qubit,
                                 std::size_t amplitude_count = 21, double decades = 1.5,
                                 const SweepOptions& options = {});

struct ReflectionStudy {
    std::vector<double> reflection_amplitudes;
    std::vector<PopulationMap> maps;
    std::vector<OptimalAmplitude> optima;
    /// L2 distance (m^1/2) of each P|g> row from the r = 0 row, both taken at
    /// the amplitude that is optimal for r = 0.
    std::vector<double> distortion;
    /// Same, but each map uses its own optimal amplitude.
    std::vector<double> distortion_reoptimized;
};

/// One map per r for a single qubit with a reflection at `reflection_point_m`.
/// The first entry of `reflection_amplitudes` is the reference and must be 0.
ReflectionStudy reflection_study(const Scenario& scenario, std::size_t qubit,
                                 double reflection_point_m, int phase,
                                 std::span<const double> reflection_amplitudes,
                                 const SweepGrid& grid, const SweepOptions& options = {});

/// sqrt(sum (a_i - b_i)^2 * step) over a uniform axis.
double l2_distance(std::span<const double> axis, std::span<const double> a, std::span<const double> b);

struct CompressionReport {
    double length_m = 0.0;
    double input_fwhm_s = 0.0;
    double focal_fwhm_s = 0.0;
    double ratio = 0.0;
    TimeGrid grid;
};

/// Focus at d_f = L; compares the envelope FWHM at the input z = 0 with the
/// one at the focus.
CompressionReport compression_experiment(const Scenario& scenario, double length_m = 1.03);

// ---- output -----------------------------------------------------------------

/// Long format: d_f_m, amplitude, sigma_f_m, qubit, pg, pe, pf, leak.
/// Amplitudes are peak Rabi rates in rad/s.
void write_population_map_csv(std::ostream& out, const PopulationMap& map, bool header = true);
/// sigma_f_m, sigma_q_m.
void write_resolution_csv(std::ostream& out, std::span<const ResolutionPoint> points);

}  // namespace wgfocus
