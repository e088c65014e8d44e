#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wgfocus/experiments.hpp"

namespace wgfocus {

// Scenario files are TOML. Every physical quantity carries a unit suffix in
// its key (spot_size_cm, central_frequency_ghz, ...); bare physical keys and
// unknown keys are rejected. Values are held in SI units (m, Hz, s), and
// serialize_config writes them back with _m/_hz/_s suffixes so that
// parse -> serialize -> parse is the identity.

struct WaveguideConfig {
    double broad_dim_m = 22.9e-3;
    double narrow_dim_m = 10.2e-3;
    double length_m = 0.25;
    double medium_speed_m_per_s = 299792458.0;

    friend bool operator==(const WaveguideConfig&, const WaveguideConfig&) = default;
};

struct PulseConfig {
    double central_frequency_hz = 7.2e9;
    double spot_size_m = 0.035;
    double focal_point_m = 0.15;
    double amplitude = 1.0;  ///< E0, arbitrary field units
    double highpass_coefficient = 0.01;
    bool highpass = true;

    friend bool operator==(const PulseConfig&, const PulseConfig&) = default;
};

struct QubitConfig {
    double position_m = 0.15;
    double transition_frequency_hz = 7.2e9;
    double anharmonicity_hz = 420e6;
    int levels = 5;

    friend bool operator==(const QubitConfig&, const QubitConfig&) = default;
};

struct ReflectionConfig {
    bool enabled = false;
    double amplitude = 0.0;  ///< r; power_percent and return_loss_db are converted on input
    double point_m = 0.25;
    int phase = 1;
    std::vector<int> qubits;  ///< 1-based labels; empty means every qubit

    friend bool operator==(const ReflectionConfig&, const ReflectionConfig&) = default;
};

struct SweepConfig {
    double focal_start_m = 0.0;
    double focal_stop_m = 0.4;
    double focal_step_m = 0.005;
    /// Centre of the amplitude axis as a Rabi frequency (Hz); unset means the
    /// 2 pi-area estimate.
    std::optional<double> amplitude_center_hz;
    double amplitude_decades = 1.5;
    int amplitude_count = 21;
    std::vector<double> spot_sizes_m = {0.02, 0.035, 0.05, 0.07, 0.10};
    /// d_f axis of resolution sweeps: z_q +- this, same step as above.
    double resolution_half_range_m = 0.5;
    double exclusion_half_width_m = 0.1;
    std::vector<double> reflection_amplitudes = {0.0, 0.1, 0.17320508075688773, 0.31622776601683794};
    int qubit = 1;  ///< target of resolution studies (1-based)

    friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

struct RunConfig {
    std::string name = "default";
    std::string model = "rwa";
    std::string detuning = "literal";  ///< RWA detuning convention: literal | rotating_frame
    unsigned workers = 0;
    std::string output_dir = "out";
    double compress_length_m = 1.03;
    double awg_sample_rate_hz = 65e9;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct Config {
    WaveguideConfig waveguide;
    PulseConfig pulse;
    std::vector<QubitConfig> qubits = {QubitConfig{}};
    ReflectionConfig reflection;
    SweepConfig sweep;
    RunConfig run;

    void validate() const;
    Scenario scenario() const;
    /// Focal-point x amplitude grid for the pulse's own spot size.
    SweepGrid focal_grid() const;

    friend bool operator==(const Config&, const Config&) = default;
};

Config parse_config(std::string_view text, std::string_view source = "config");
Config load_config(const std::filesystem::path& path);
std::string serialize_config(const Config& config);

/// True for names usable inside output file names: [A-Za-z0-9_.-], no leading dot.
bool is_safe_name(std::string_view name);

}  // namespace wgfocus
