#pragma once

#include <numbers>

// Everything inside the library is SI: seconds, meters, radians/second.
// Conversions from the human units used in config files live here.
namespace wgfocus::units {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double ghz_to_angular(double ghz) { return kTwoPi * ghz * 1e9; }
constexpr double mhz_to_angular(double mhz) { return kTwoPi * mhz * 1e6; }
constexpr double hz_to_angular(double hz) { return kTwoPi * hz; }
constexpr double angular_to_ghz(double w) { return w / (kTwoPi * 1e9); }
constexpr double angular_to_hz(double w) { return w / kTwoPi; }

constexpr double cm(double v) { return v * 1e-2; }
constexpr double mm(double v) { return v * 1e-3; }
constexpr double ns(double v) { return v * 1e-9; }

}  // namespace wgfocus::units
