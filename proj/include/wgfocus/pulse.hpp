#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "wgfocus/waveguide.hpp"

namespace wgfocus {

/// Gaussian k-space pulse that self-focuses at `focal_point_m`.
struct PulseSpec {
    double amplitude = 1.0;              ///< E0; focal envelope peak in field units
    double spot_size_m = 0.035;          ///< sigma_f
    double central_wavevector = 0.0;     ///< k0, rad/m
    double focal_point_m = 0.0;          ///< d_f
    double highpass_coefficient = 0.01;  ///< eta in exp(-eta k_c^2 / k^2)
    bool highpass_enabled = true;

    void validate() const;

    /// Pulse whose central wavevector maps to `central_angular_frequency`.
    static PulseSpec centered_at(const DispersionModel& model, double central_angular_frequency,
                                 double spot_size_m, double focal_point_m);

    double central_angular_frequency(const DispersionModel& model) const {
        return model.omega_of_k(central_wavevector);
    }

    friend bool operator==(const PulseSpec&, const PulseSpec&) = default;
};

/// Uniform sampling grid t_n = start + n * step.
struct TimeGrid {
    double start = 0.0;
    double step = 0.0;
    std::size_t count = 0;

    double time(std::size_t n) const { return start + static_cast<double>(n) * step; }
    double duration() const { return static_cast<double>(count) * step; }
    void validate() const;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// Real time-domain field sampled at one position along the guide.
struct SampledWaveform {
    double start_time = 0.0;
    double sample_period = 0.0;
    std::vector<double> samples;
    double position_m = 0.0;

    TimeGrid grid() const { return {start_time, sample_period, samples.size()}; }
    double time(std::size_t n) const { return start_time + static_cast<double>(n) * sample_period; }
    /// Discrete signal energy, sum of x^2 dt.
    double energy() const;
};

/// One-sided k-space amplitude on a uniform grid.
struct SpectralField {
    std::vector<double> k;
    std::vector<std::complex<double>> amplitude;

    double spacing() const { return k.size() > 1 ? k[1] - k[0] : 0.0; }
};

/// E(t) = A(t) exp(i phi(t)). Instantaneous frequency is NaN where the
/// envelope is below the mask floor.
struct AnalyticSignal {
    double start_time = 0.0;
    double sample_period = 0.0;
    std::vector<std::complex<double>> values;
    std::vector<double> envelope;
    std::vector<double> phase;  ///< unwrapped
    std::vector<double> instantaneous_frequency;

    static constexpr double kMaskFloor = 1e-3;  ///< relative to peak envelope

    std::size_t size() const { return values.size(); }
    bool frequency_defined(std::size_t n) const;
    double peak_envelope() const;
};

// ---- spectrum -------------------------------------------------------------

/// exp(-eta k_c^2 / k^2); 1 when the filter is disabled.
double highpass_factor(const PulseSpec& spec, const DispersionModel& model, double k);

/// Unnormalized Gaussian amplitude times the high-pass factor; 0 for k <= 0.
double spectral_amplitude(const PulseSpec& spec, const DispersionModel& model, double k);

/// Edges of the k range carrying the pulse: k0 +- 6/sigma_f clipped to where
/// the amplitude is still resolvable above zero. Throws ConfigError when the
/// clip at k = 0 would cut non-negligible amplitude.
struct WavevectorBand {
    double lower;
    double upper;
};
WavevectorBand spectral_band(const PulseSpec& spec, const DispersionModel& model);

/// Sampled spectral profile (default 4096 points). Throws NumericError if the
/// edges exceed 1e-6 of the peak.
SpectralField spectral_profile(const PulseSpec& spec, const DispersionModel& model,
                               std::size_t points = 4096);

/// Highest angular frequency carried by the pulse.
double max_angular_frequency(const PulseSpec& spec, const DispersionModel& model);

// ---- time grids -----------------------------------------------------------

/// Window covering every requested position, sized from the slowest
/// significant group velocity and grown until the envelope at the window
/// edges stays below `edge_threshold` of its peak. Sample period 1/(20 f_max);
/// t = 0 falls on a sample; count is a power of two.
TimeGrid plan_time_grid(const PulseSpec& spec, const DispersionModel& model,
                        std::span<const double> positions_m, double edge_threshold = 5e-5);

// ---- synthesis ------------------------------------------------------------

/// Discrete-Fourier synthesis of the focusing pulse on a fixed time grid.
///
/// The one-sided spectrum is laid out on the FFT frequency bins once; every
/// position then costs one inverse FFT. The focal envelope peak equals E0.
/// Propagation is toward +z: at positions before the focus the pulse arrives
/// at negative times with an up-chirp.
class FieldSynthesizer {
public:
    FieldSynthesizer(const PulseSpec& spec, const DispersionModel& model, const TimeGrid& grid);

    const TimeGrid& grid() const { return grid_; }
    const PulseSpec& spec() const { return spec_; }
    const DispersionModel& model() const { return model_; }

    /// Complex analytic field at displacement dz = z - d_f from the focus.
    std::vector<std::complex<double>> analytic_displaced(double dz) const;

    /// Same, but throws WindowingError if the pulse reaches the window edges.
    std::vector<std::complex<double>> checked_analytic_displaced(double dz) const;

    AnalyticSignal analytic_signal_at(double z) const;
    SampledWaveform field_at(double z) const;

    /// Normalized one-sided spectrum per positive FFT bin (diagnostics).
    const std::vector<double>& bin_spectrum() const { return spectrum_; }
    const std::vector<double>& bin_angular_frequency() const { return omega_; }

private:
    PulseSpec spec_;
    DispersionModel model_;
    TimeGrid grid_;
    std::size_t first_bin_ = 0;
    std::vector<double> omega_;     // angular frequency of bins first_bin_..
    std::vector<double> k_;         // k(omega) for those bins
    std::vector<double> spectrum_;  // Jacobian-weighted amplitude, normalized
};

/// Focal waveform (all spectral components in phase at t = 0).
SampledWaveform synthesize_at_focus(const PulseSpec& spec, const DispersionModel& model,
                                    const TimeGrid& grid);

/// Field at position z (input of the guide is z = 0).
SampledWaveform field_at_position(const PulseSpec& spec, const DispersionModel& model, double z,
                                  const TimeGrid& grid);

/// Direct trapezoidal evaluation of E0 * Re int dk E(k) exp(i(omega(k) t - k dz))
/// over the spectral_profile grid. O(points * samples); an independent route
/// used to cross-check the FFT synthesis.
SampledWaveform synthesize_direct(const PulseSpec& spec, const DispersionModel& model,
                                  const TimeGrid& grid, double z, std::size_t points = 4096);

/// Shift a waveform by dz along the guide (negative = back-propagation).
SampledWaveform propagate(const SampledWaveform& wave, const DispersionModel& model, double dz);

// ---- analysis -------------------------------------------------------------

AnalyticSignal analytic_signal(const SampledWaveform& wave);

/// Build envelope, unwrapped phase and masked instantaneous frequency from
/// complex analytic samples.
AnalyticSignal make_analytic_signal(double start_time, double sample_period,
                                    std::vector<std::complex<double>> values);

/// True if the envelope in the first and last 1% of the window is below
/// `threshold` times its peak.
bool window_is_clear(std::span<const double> envelope, double threshold = 1e-4);

/// Full width at half maximum between the outermost half-level crossings,
/// linearly interpolated. Throws NumericError if the curve does not drop
/// below half on both sides.
double fwhm(std::span<const double> axis, std::span<const double> values);
double fwhm(double start, double step, std::span<const double> values);

// ---- AWG export -----------------------------------------------------------

/// Highest frequency (Hz) whose spectral magnitude exceeds `relative_floor`
/// of the peak.
double max_frequency_content(const SampledWaveform& wave, double relative_floor = 1e-6);

/// Band-limited resampling onto an AWG clock. Requires the rate to be at
/// least 2.5x the highest frequency content, otherwise ConfigError.
SampledWaveform resample_for_awg(const SampledWaveform& wave, double sample_rate);

}  // namespace wgfocus
