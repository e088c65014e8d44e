#include "wgfocus/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wgfocus/detail/fft.hpp"
#include "wgfocus/errors.hpp"

namespace wgfocus {
namespace {

using cplx = std::complex<double>;

constexpr double kBandHalfWidth = 6.0;      // in units of 1/sigma_f
constexpr double kEdgeLevel = 1e-8;         // where the band is clipped near k = 0
constexpr double kSignificantLevel = 1e-6;  // slowest content the window must hold
constexpr std::size_t kMaxGridSamples = std::size_t{1} << 24;

// Largest k in (0, k_hi] with amplitude below `level * reference`, assuming
// the amplitude is increasing on that interval.
double wavevector_at_level(const PulseSpec& spec, const DispersionModel& model, double k_hi,
                           double level) {
    const double target = level * spectral_amplitude(spec, model, spec.central_wavevector);
    double lo = 0.0;
    double hi = k_hi;
    if (spectral_amplitude(spec, model, hi) <= target) return hi;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * k_hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (spectral_amplitude(spec, model, mid) <= target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> magnitudes(std::span<const cplx> v) {
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](cplx c) { return std::abs(c); });
    return out;
}

std::vector<cplx> to_complex(std::span<const double> x) {
    return {x.begin(), x.end()};
}

}  // namespace

// ---- PulseSpec / TimeGrid / SampledWaveform --------------------------------

void PulseSpec::validate() const {
    if (!(spot_size_m > 0.0)) throw ConfigError("pulse: spot size must be positive");
    if (!(central_wavevector > 0.0)) {
        throw ConfigError("pulse: central wavevector must be positive (frequency above cutoff)");
    }
    if (!(focal_point_m >= 0.0)) throw ConfigError("pulse: focal point must be >= 0");
    if (!(highpass_coefficient >= 0.0)) {
        throw ConfigError("pulse: high-pass coefficient must be >= 0");
    }
    if (!std::isfinite(amplitude)) throw ConfigError("pulse: amplitude must be finite");
}

PulseSpec PulseSpec::centered_at(const DispersionModel& model, double central_angular_frequency,
                                 double spot_size_m, double focal_point_m) {
    PulseSpec spec;
    spec.spot_size_m = spot_size_m;
    spec.central_wavevector = model.k_of_omega(central_angular_frequency);
    spec.focal_point_m = focal_point_m;
    spec.validate();
    return spec;
}

void TimeGrid::validate() const {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw ConfigError("time grid: step must be positive");
    }
    if (count < 4) throw ConfigError("time grid: need at least 4 samples");
    if (!std::isfinite(start)) throw ConfigError("time grid: start must be finite");
}

double SampledWaveform::energy() const {
    double acc = 0.0;
    for (double x : samples) acc += x * x;
    return acc * sample_period;
}

bool AnalyticSignal::frequency_defined(std::size_t n) const {
    return !std::isnan(instantaneous_frequency.at(n));
}

double AnalyticSignal::peak_envelope() const { return max_abs(envelope); }

// ---- spectrum -------------------------------------------------------------

double highpass_factor(const PulseSpec& spec, const DispersionModel& model, double k) {
    if (!spec.highpass_enabled || spec.highpass_coefficient == 0.0) return 1.0;
    if (!(k > 0.0)) return 0.0;
    const double kc = model.cutoff_wavevector();
    return std::exp(-spec.highpass_coefficient * kc * kc / (k * k));
}

double spectral_amplitude(const PulseSpec& spec, const DispersionModel& model, double k) {
    if (!(k > 0.0)) return 0.0;
    const double x = spec.spot_size_m * (k - spec.central_wavevector);
    return std::exp(-0.5 * x * x) * highpass_factor(spec, model, k);
}

WavevectorBand spectral_band(const PulseSpec& spec, const DispersionModel& model) {
    spec.validate();
    const double k0 = spec.central_wavevector;
    const double half = kBandHalfWidth / spec.spot_size_m;
    WavevectorBand band{k0 - half, k0 + half};

    // Amplitude just above k = 0; the high-pass filter drives it to zero.
    const double x0 = spec.spot_size_m * k0;
    const bool filtered = spec.highpass_enabled && spec.highpass_coefficient > 0.0;
    const double at_origin = filtered ? 0.0 : std::exp(-0.5 * x0 * x0);
    const double reference = spectral_amplitude(spec, model, k0);

    if (band.lower <= 0.0) {
        if (at_origin > 1e-6 * reference) {
            throw ConfigError("pulse: spot size " + std::to_string(spec.spot_size_m) +
                              " m is too small for the chosen central wavevector; the spectrum "
                              "reaches k <= 0 (enable the high-pass filter or widen the spot)");
        }
        band.lower = 0.0;
    }
    // Near k = 0 the group velocity vanishes; clip where the amplitude is
    // negligible so the time window stays finite.
    band.lower = std::max(band.lower, wavevector_at_level(spec, model, k0, kEdgeLevel));
    if (band.lower <= 0.0) band.lower = 1e-6 * k0;
    return band;
}

SpectralField spectral_profile(const PulseSpec& spec, const DispersionModel& model,
                               std::size_t points) {
    if (points < 8) throw ConfigError("spectral_profile: need at least 8 points");
    const auto band = spectral_band(spec, model);
    SpectralField field;
    field.k.resize(points);
    field.amplitude.resize(points);
    const double dk = (band.upper - band.lower) / static_cast<double>(points - 1);
    double peak = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const double k = band.lower + dk * static_cast<double>(i);
        field.k[i] = k;
        const double a = spectral_amplitude(spec, model, k);
        field.amplitude[i] = a;
        peak = std::max(peak, a);
    }
    const double edge = std::max(std::abs(field.amplitude.front()), std::abs(field.amplitude.back()));
    if (!(peak > 0.0) || edge >= 1e-6 * peak) {
        throw NumericError("spectral_profile: spectrum truncated at grid edge (edge/peak = " +
                           std::to_string(peak > 0.0 ? edge / peak : 1.0) + ")");
    }
    return field;
}

double max_angular_frequency(const PulseSpec& spec, const DispersionModel& model) {
    return model.omega_of_k(spectral_band(spec, model).upper);
}

// ---- time grids -----------------------------------------------------------

TimeGrid plan_time_grid(const PulseSpec& spec, const DispersionModel& model,
                        std::span<const double> positions_m, double edge_threshold) {
    if (!(edge_threshold > 0.0 && edge_threshold < 1.0)) {
        throw ConfigError("plan_time_grid: edge threshold must lie in (0, 1)");
    }
    const auto band = spectral_band(spec, model);
    const double f_max = model.omega_of_k(band.upper) / units::kTwoPi;
    const double dt = 1.0 / (20.0 * f_max);

    const double k_slow =
        std::max(band.lower, wavevector_at_level(spec, model, spec.central_wavevector,
                                                 kSignificantLevel));
    const double v_slow = model.group_velocity(model.omega_of_k(k_slow));

    double dz_min = 0.0;
    double dz_max = 0.0;
    for (double z : positions_m) {
        dz_min = std::min(dz_min, z - spec.focal_point_m);
        dz_max = std::max(dz_max, z - spec.focal_point_m);
    }
    const double lead = -dz_min / v_slow;
    const double lag = dz_max / v_slow;

    // Rough focal width: inverse of the temporal bandwidth at the carrier.
    const double omega0 = model.omega_of_k(spec.central_wavevector);
    const double focal_width = spec.spot_size_m / model.group_velocity(omega0);
    double margin = 10e-9 + 6.0 * focal_width;

    for (int attempt = 0; attempt < 16; ++attempt) {
        const auto n_lead = static_cast<std::size_t>(std::ceil((lead + margin) / dt));
        const auto n_lag = static_cast<std::size_t>(std::ceil((lag + margin) / dt));
        const std::size_t needed = n_lead + n_lag + 1;
        const std::size_t count = detail::next_pow2(needed);
        if (count > kMaxGridSamples) break;
        const std::size_t pad = (count - needed) / 2;
        const TimeGrid grid{-static_cast<double>(n_lead + pad) * dt, dt, count};

        const FieldSynthesizer synth(spec, model, grid);
        bool clear = true;
        for (double dz : {dz_min, 0.0, dz_max}) {
            if (!window_is_clear(magnitudes(synth.analytic_displaced(dz)), edge_threshold)) {
                clear = false;
                break;
            }
        }
        if (clear) return grid;
        margin *= 1.6;
    }
    throw WindowingError("plan_time_grid: could not find a window that contains the pulse");
}

// ---- FieldSynthesizer -----------------------------------------------------

FieldSynthesizer::FieldSynthesizer(const PulseSpec& spec, const DispersionModel& model,
                                   const TimeGrid& grid)
    : spec_(spec), model_(model), grid_(grid) {
    grid_.validate();
    const auto band = spectral_band(spec_, model_);
    const double omega_lo = model_.omega_of_k(band.lower);
    const double omega_hi = model_.omega_of_k(band.upper);
    const double f_max = omega_hi / units::kTwoPi;
    if (grid_.step * 8.0 * f_max >= 1.0) {
        throw ConfigError("time grid: sample period " + std::to_string(grid_.step) +
                          " s too coarse, need < 1/(8 f_max) = " +
                          std::to_string(1.0 / (8.0 * f_max)) + " s");
    }

    const std::size_t n = grid_.count;
    const double d_omega = units::kTwoPi / (static_cast<double>(n) * grid_.step);
    first_bin_ = static_cast<std::size_t>(std::ceil(omega_lo / d_omega));
    const auto last_bin =
        std::min(static_cast<std::size_t>(std::floor(omega_hi / d_omega)), (n - 1) / 2);

    const double c2 = model_.medium_speed() * model_.medium_speed();
    double norm = 0.0;
    for (std::size_t j = first_bin_; j <= last_bin; ++j) {
        const double w = d_omega * static_cast<double>(j);
        if (w <= model_.cutoff_angular_frequency()) continue;
        const double k = model_.k_of_omega(w);
        // dk/domega = omega / (c^2 k) maps the k-integral onto frequency bins.
        const double s = spectral_amplitude(spec_, model_, k) * w / (c2 * k);
        omega_.push_back(w);
        k_.push_back(k);
        spectrum_.push_back(s);
        norm += s;
    }
    if (!(norm > 0.0)) {
        throw NumericError("synthesis: no spectral content falls on the frequency grid");
    }
    first_bin_ = static_cast<std::size_t>(std::llround(omega_.front() / d_omega));
    const double scale = spec_.amplitude / norm;
    for (double& s : spectrum_) s *= scale;
}

std::vector<std::complex<double>> FieldSynthesizer::analytic_displaced(double dz) const {
    std::vector<cplx> buf(grid_.count, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < omega_.size(); ++i) {
        // Forward-travelling wave: exp(i(omega t - k dz)), referenced to the window start.
        const double phase = omega_[i] * grid_.start - k_[i] * dz;
        buf[first_bin_ + i] = std::polar(spectrum_[i], phase);
    }
    detail::fft_backward(buf);
    return buf;
}

std::vector<std::complex<double>> FieldSynthesizer::checked_analytic_displaced(double dz) const {
    auto values = analytic_displaced(dz);
    if (!window_is_clear(magnitudes(values))) {
        throw WindowingError("synthesis: pulse at displacement " + std::to_string(dz) +
                             " m reaches the time-window edges; widen the window");
    }
    return values;
}

AnalyticSignal FieldSynthesizer::analytic_signal_at(double z) const {
    return make_analytic_signal(grid_.start, grid_.step,
                                checked_analytic_displaced(z - spec_.focal_point_m));
}

SampledWaveform FieldSynthesizer::field_at(double z) const {
    const auto values = checked_analytic_displaced(z - spec_.focal_point_m);
    SampledWaveform wave{grid_.start, grid_.step, std::vector<double>(values.size()), z};
    std::transform(values.begin(), values.end(), wave.samples.begin(),
                   [](cplx c) { return c.real(); });
    return wave;
}

SampledWaveform synthesize_at_focus(const PulseSpec& spec, const DispersionModel& model,
                                    const TimeGrid& grid) {
    return FieldSynthesizer(spec, model, grid).field_at(spec.focal_point_m);
}

SampledWaveform field_at_position(const PulseSpec& spec, const DispersionModel& model, double z,
                                  const TimeGrid& grid) {
    if (!(z >= 0.0)) throw ConfigError("field_at_position: z must be >= 0 (guide input is z = 0)");
    return FieldSynthesizer(spec, model, grid).field_at(z);
}

SampledWaveform synthesize_direct(const PulseSpec& spec, const DispersionModel& model,
                                  const TimeGrid& grid, double z, std::size_t points) {
    grid.validate();
    const auto profile = spectral_profile(spec, model, points);
    const double dk = profile.spacing();
    const double dz = z - spec.focal_point_m;
    std::vector<cplx> acc(grid.count, cplx{0.0, 0.0});
    double norm = 0.0;
    for (std::size_t m = 0; m < points; ++m) {
        const double weight = (m == 0 || m + 1 == points) ? 0.5 * dk : dk;
        const double a = weight * profile.amplitude[m].real();
        if (a == 0.0) continue;
        norm += a;
        const double k = profile.k[m];
        const double w = model.omega_of_k(k);
        const cplx rot = std::polar(1.0, w * grid.step);
        cplx ph = std::polar(a, w * grid.start - k * dz);
        for (std::size_t n = 0; n < grid.count; ++n) {
            acc[n] += ph;
            ph *= rot;
        }
    }
    SampledWaveform wave{grid.start, grid.step, std::vector<double>(grid.count), z};
    const double scale = spec.amplitude / norm;
    for (std::size_t n = 0; n < grid.count; ++n) wave.samples[n] = scale * acc[n].real();
    return wave;
}

SampledWaveform propagate(const SampledWaveform& wave, const DispersionModel& model, double dz) {
    if (wave.samples.size() < 4 || !(wave.sample_period > 0.0)) {
        throw ConfigError("propagate: waveform needs >= 4 samples and a positive period");
    }
    SampledWaveform out = wave;
    out.position_m = wave.position_m + dz;
    if (dz == 0.0) return out;

    const std::size_t n = wave.samples.size();
    auto spec = to_complex(wave.samples);
    detail::fft_forward(spec);

    const double d_omega = units::kTwoPi / (static_cast<double>(n) * wave.sample_period);
    double total = 0.0;
    double dropped = 0.0;
    // One-sided: positive bins get the transfer phase, negative bins its
    // conjugate, so the output stays real.
    std::vector<cplx> one_sided(n, cplx{0.0, 0.0});
    for (std::size_t j = 0; j < n; ++j) total += std::norm(spec[j]);
    for (std::size_t j = 1; 2 * j < n; ++j) {
        const double w = d_omega * static_cast<double>(j);
        if (w <= model.cutoff_angular_frequency()) {
            dropped += 2.0 * std::norm(spec[j]);
            continue;
        }
        one_sided[j] = spec[j] * std::polar(1.0, -model.k_of_omega(w) * dz);
    }
    dropped += std::norm(spec[0]);
    if (n % 2 == 0) dropped += std::norm(spec[n / 2]);
    if (total > 0.0 && dropped > 1e-6 * total) {
        throw NumericError("propagate: " + std::to_string(dropped / total) +
                           " of the signal energy lies below cutoff and cannot propagate");
    }

    detail::fft_backward(one_sided);
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> env(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Analytic signal is 2/N * backward(one-sided); the real field is its real part.
        const cplx zi = 2.0 * inv_n * one_sided[i];
        out.samples[i] = zi.real();
        env[i] = std::abs(zi);
    }
    if (!window_is_clear(env)) {
        throw WindowingError("propagate: pulse wrapped around the time window after dz = " +
                             std::to_string(dz) + " m; widen the window");
    }
    return out;
}

// ---- analysis -------------------------------------------------------------

AnalyticSignal analytic_signal(const SampledWaveform& wave) {
    const std::size_t n = wave.samples.size();
    auto buf = to_complex(wave.samples);
    detail::fft_forward(buf);
    for (std::size_t j = 1; j < n; ++j) {
        if (2 * j < n) {
            buf[j] *= 2.0;
        } else if (2 * j > n) {
            buf[j] = 0.0;
        }
    }
    detail::fft_backward(buf);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& c : buf) c *= inv_n;
    return make_analytic_signal(wave.start_time, wave.sample_period, std::move(buf));
}

AnalyticSignal make_analytic_signal(double start_time, double sample_period,
                                    std::vector<std::complex<double>> values) {
    AnalyticSignal sig;
    sig.start_time = start_time;
    sig.sample_period = sample_period;
    const std::size_t n = values.size();
    sig.envelope.resize(n);
    sig.phase.resize(n);
    sig.instantaneous_frequency.assign(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < n; ++i) sig.envelope[i] = std::abs(values[i]);
    if (n > 0) sig.phase[0] = std::arg(values[0]);
    for (std::size_t i = 1; i < n; ++i) {
        sig.phase[i] = sig.phase[i - 1] + std::arg(values[i] * std::conj(values[i - 1]));
    }
    const double floor = AnalyticSignal::kMaskFloor * max_abs(sig.envelope);
    if (n >= 2 && floor > 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            if (sig.envelope[i] < floor) continue;
            if (i == 0) {
                sig.instantaneous_frequency[i] = (sig.phase[1] - sig.phase[0]) / sample_period;
            } else if (i + 1 == n) {
                sig.instantaneous_frequency[i] = (sig.phase[i] - sig.phase[i - 1]) / sample_period;
            } else {
                sig.instantaneous_frequency[i] =
                    (sig.phase[i + 1] - sig.phase[i - 1]) / (2.0 * sample_period);
            }
        }
    }
    sig.values = std::move(values);
    return sig;
}

bool window_is_clear(std::span<const double> envelope, double threshold) {
    const double peak = max_abs(envelope);
    if (!(peak > 0.0)) return true;
    const std::size_t edge = std::max<std::size_t>(1, envelope.size() / 100);
    const double limit = threshold * peak;
    for (std::size_t i = 0; i < edge && i < envelope.size(); ++i) {
        if (std::abs(envelope[i]) >= limit) return false;
        if (std::abs(envelope[envelope.size() - 1 - i]) >= limit) return false;
    }
    return true;
}

double fwhm(std::span<const double> axis, std::span<const double> values) {
    if (axis.size() != values.size() || values.size() < 3) {
        throw ConfigError("fwhm: axis and values must have equal length >= 3");
    }
    const auto peak_it = std::max_element(values.begin(), values.end());
    const double half = 0.5 * *peak_it;
    if (!(*peak_it > 0.0)) throw NumericError("fwhm: curve has no positive maximum");
    std::size_t first = 0;
    while (values[first] < half) ++first;
    std::size_t last = values.size() - 1;
    while (values[last] < half) --last;
    if (first == 0 || last + 1 == values.size()) {
        throw NumericError("fwhm: curve does not fall below half maximum on both sides "
                           "(unbounded width)");
    }
    auto cross = [&](std::size_t below, std::size_t above) {
        const double frac = (half - values[below]) / (values[above] - values[below]);
        return axis[below] + frac * (axis[above] - axis[below]);
    };
    return cross(last + 1, last) - cross(first - 1, first);
}

double fwhm(double start, double step, std::span<const double> values) {
    std::vector<double> axis(values.size());
    for (std::size_t i = 0; i < axis.size(); ++i) axis[i] = start + step * static_cast<double>(i);
    return fwhm(axis, values);
}

// ---- AWG export -----------------------------------------------------------

double max_frequency_content(const SampledWaveform& wave, double relative_floor) {
    const std::size_t n = wave.samples.size();
    if (n < 4) throw ConfigError("max_frequency_content: need at least 4 samples");
    auto buf = to_complex(wave.samples);
    detail::fft_forward(buf);
    double peak = 0.0;
    for (std::size_t j = 0; 2 * j <= n; ++j) peak = std::max(peak, std::abs(buf[j]));
    std::size_t top = 0;
    for (std::size_t j = 0; 2 * j <= n; ++j) {
        if (std::abs(buf[j]) > relative_floor * peak) top = j;
    }
    return static_cast<double>(top) / (static_cast<double>(n) * wave.sample_period);
}

SampledWaveform resample_for_awg(const SampledWaveform& wave, double sample_rate) {
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
        throw ConfigError("export_awg: sample rate must be positive");
    }
    const double f_max = max_frequency_content(wave);
    if (sample_rate < 2.5 * f_max) {
        throw ConfigError("export_awg: sample rate " + std::to_string(sample_rate) +
                          " S/s aliases content up to " + std::to_string(f_max) +
                          " Hz (need >= 2.5x)");
    }
    const std::size_t n = wave.samples.size();
    auto buf = to_complex(wave.samples);
    detail::fft_forward(buf);
    double peak = 0.0;
    for (std::size_t j = 0; 2 * j <= n; ++j) peak = std::max(peak, std::abs(buf[j]));

    const double out_dt = 1.0 / sample_rate;
    const auto count = static_cast<std::size_t>(std::floor(wave.grid().duration() * sample_rate));
    SampledWaveform out{wave.start_time, out_dt, std::vector<double>(count, 0.0), wave.position_m};
    std::vector<cplx> acc(count, cplx{0.0, 0.0});
    const double d_omega = units::kTwoPi / (static_cast<double>(n) * wave.sample_period);
    // Trigonometric interpolation restricted to bins that carry signal.
    for (std::size_t j = 0; 2 * j <= n; ++j) {
        if (std::abs(buf[j]) <= 1e-14 * peak) continue;
        const double weight = (j == 0 || 2 * j == n) ? 1.0 : 2.0;
        const double w = d_omega * static_cast<double>(j);
        const cplx rot = std::polar(1.0, w * out_dt);
        cplx ph = weight * buf[j];
        for (std::size_t m = 0; m < count; ++m) {
            acc[m] += ph;
            ph *= rot;
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t m = 0; m < count; ++m) out.samples[m] = acc[m].real() * inv_n;
    return out;
}

}  // namespace wgfocus
