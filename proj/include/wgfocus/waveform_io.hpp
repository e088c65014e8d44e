#pragma once

#include <filesystem>
#include <iosfwd>

#include "wgfocus/pulse.hpp"

namespace wgfocus {

enum class WaveformFormat { text, binary };

// Text layout:
//
//   sample_rate <S/s>
//   t0 <s>
//   position_m <m>
//   count <n>
//   <sample>        (one per line, n lines)
//
// Numbers use the shortest round-trip decimal form, so text files reproduce
// the samples exactly as well.
//
// Binary layout, all little-endian: f64 sample_rate, f64 t0, f64 position_m,
// u64 count, then count f64 samples.

void write_waveform(std::ostream& out, const SampledWaveform& wave, WaveformFormat format);
void write_waveform(const std::filesystem::path& path, const SampledWaveform& wave,
                    WaveformFormat format);

SampledWaveform read_waveform(std::istream& in, WaveformFormat format);
/// Detects the format from the first bytes ("sample_rate" means text).
SampledWaveform read_waveform(const std::filesystem::path& path);

/// Diagnostic dump: k_rad_per_m, f_GHz, re, im.
void write_spectrum_csv(std::ostream& out, const SpectralField& field, const DispersionModel& model);

}  // namespace wgfocus
