#include "wgfocus/channel.hpp"

#include <cmath>
#include <string>

#include "wgfocus/detail/format.hpp"
#include "wgfocus/errors.hpp"

namespace wgfocus {

void ReflectionSpec::validate() const {
    if (!(amplitude >= 0.0 && amplitude < 1.0)) {
        throw ConfigError("reflection amplitude must lie in [0, 1), got " +
                          detail::format_double(amplitude));
    }
    if (!std::isfinite(point_m)) throw ConfigError("reflection point must be finite");
    if (phase != 1 && phase != -1) throw ConfigError("reflection phase must be +1 or -1");
}

double reflection_amplitude_from_power_percent(double percent) {
    if (!(percent >= 0.0 && percent < 100.0)) {
        throw ConfigError("reflected power must lie in [0, 100) percent");
    }
    return std::sqrt(percent / 100.0);
}

double reflection_amplitude_from_return_loss_db(double db) {
    if (!std::isfinite(db) || db == 0.0) throw ConfigError("return loss must be finite and nonzero");
    return std::pow(10.0, -std::abs(db) / 20.0);
}

double image_position(double z_q, const ReflectionSpec& refl) { return 2.0 * refl.point_m - z_q; }

namespace {

void check_geometry(double z_q, const ReflectionSpec& refl) {
    refl.validate();
    if (!(z_q < refl.point_m)) {
        throw ConfigError("qubit at " + detail::format_double(z_q) +
                          " m is not upstream of the reflection point " +
                          detail::format_double(refl.point_m) + " m");
    }
}

}  // namespace

std::vector<std::complex<double>> analytic_with_reflection(const FieldSynthesizer& synth, double z_q,
                                                           const ReflectionSpec& refl) {
    check_geometry(z_q, refl);
    const double d_f = synth.spec().focal_point_m;
    auto direct = synth.checked_analytic_displaced(z_q - d_f);
    if (refl.amplitude == 0.0) return direct;
    const auto echo = synth.checked_analytic_displaced(image_position(z_q, refl) - d_f);
    const double r = refl.amplitude * refl.phase;
    for (std::size_t i = 0; i < direct.size(); ++i) direct[i] += r * echo[i];
    return direct;
}

AnalyticSignal analytic_signal_with_reflection(const FieldSynthesizer& synth, double z_q,
                                               const ReflectionSpec& refl) {
    return make_analytic_signal(synth.grid().start, synth.grid().step,
                                analytic_with_reflection(synth, z_q, refl));
}

SampledWaveform field_with_reflection(const PulseSpec& spec, const DispersionModel& model, double z_q,
                                      const ReflectionSpec& refl, const TimeGrid& grid) {
    if (!(z_q >= 0.0)) throw ConfigError("qubit position must be >= 0");
    const FieldSynthesizer synth(spec, model, grid);
    const auto values = analytic_with_reflection(synth, z_q, refl);
    SampledWaveform wave{grid.start, grid.step, std::vector<double>(values.size()), z_q};
    for (std::size_t i = 0; i < values.size(); ++i) wave.samples[i] = values[i].real();
    return wave;
}

}  // namespace wgfocus
