#pragma once

#include <complex>
#include <vector>

#include "wgfocus/pulse.hpp"

namespace wgfocus {

/// Point-like, frequency-independent reflection downstream of the qubits.
struct ReflectionSpec {
    double amplitude = 0.0;  ///< r, 0 <= r < 1
    double point_m = 0.0;    ///< z_r
    int phase = 1;           ///< +1 or -1

    void validate() const;

    friend bool operator==(const ReflectionSpec&, const ReflectionSpec&) = default;
};

/// r = sqrt(P_reflected / P_incident).
double reflection_amplitude_from_power_percent(double percent);
/// r from a return loss in dB; -10 dB and 10 dB both mean 10% reflected power.
double reflection_amplitude_from_return_loss_db(double db);

/// Position at which the forward field reproduces the reflected wave at z_q.
double image_position(double z_q, const ReflectionSpec& refl);

/// E(z_q) + r * phase * E(2 z_r - z_q): the reflected term is the forward
/// field evaluated at the image position. Single bounce only.
std::vector<std::complex<double>> analytic_with_reflection(const FieldSynthesizer& synth, double z_q,
                                                           const ReflectionSpec& refl);

AnalyticSignal analytic_signal_with_reflection(const FieldSynthesizer& synth, double z_q,
                                               const ReflectionSpec& refl);

SampledWaveform field_with_reflection(const PulseSpec& spec, const DispersionModel& model, double z_q,
                                      const ReflectionSpec& refl, const TimeGrid& grid);

}  // namespace wgfocus
