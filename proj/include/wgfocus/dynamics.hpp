#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "wgfocus/pulse.hpp"

namespace wgfocus {

/// How Delta = omega_ge - dphi/dt enters the two-level Hamiltonian.
///   literal:        H = Delta sigma_z + (g/2) sigma_x (levels split by 2 Delta)
///   rotating_frame: H = (Delta/2) sigma_z + (g/2) sigma_x, the rotating-wave
///                   limit of the lab-frame ladder
enum class DetuningConvention { literal, rotating_frame };

std::string to_string(DetuningConvention convention);
DetuningConvention parse_detuning_convention(const std::string& text);

/// Weakly anharmonic ladder: omega_n = n omega_ge - alpha n (n - 1) / 2.
struct TransmonSpec {
    double transition_frequency = 0.0;  ///< omega_ge, rad/s
    double anharmonicity = 0.0;         ///< alpha, rad/s (positive compresses the ladder)
    int level_count = 5;
    double dipole_scale = 0.0;          ///< d_eg: peak Rabi rate (rad/s) per unit envelope
    double position_m = 0.0;
    DetuningConvention detuning = DetuningConvention::literal;  ///< RWA model only

    void validate() const;

    friend bool operator==(const TransmonSpec&, const TransmonSpec&) = default;
};

std::vector<double> transmon_levels(const TransmonSpec& spec);

/// Amplitudes c_0..c_{N-1} in the bare level basis (index 0 = ground).
struct QuantumState {
    std::vector<std::complex<double>> amplitudes;

    static QuantumState ground(int levels);
    std::size_t levels() const { return amplitudes.size(); }
    double norm_squared() const;
    double population(std::size_t n) const { return std::norm(amplitudes.at(n)); }
};

/// Rotating-frame drive seen by a qubit: Delta(t) = omega_ge - dphi/dt and
/// g(t) = d_eg A(t). Detuning is NaN where the envelope is masked. Under the
/// rotating_frame convention the stored detuning is Delta / 2, so that
/// lz_hamiltonian and evolve_rwa read it the same way in both conventions.
struct DriveSignals {
    double start_time = 0.0;
    double sample_period = 0.0;
    std::vector<double> detuning;
    std::vector<double> coupling;
    std::vector<double> field;  ///< real field at the qubit

    std::size_t size() const { return coupling.size(); }
    bool defined(std::size_t n) const;
};

DriveSignals drive_signals(const AnalyticSignal& signal, const TransmonSpec& spec);

/// Rotating-frame Landau-Zener Hamiltonian in the {excited, ground} basis,
/// [[Delta, g/2], [g/2, -Delta]]; the excited level carries +Delta.
Eigen::Matrix2cd lz_hamiltonian(double detuning, double coupling);

struct DressedEnergies {
    double lower;
    double upper;
    double gap() const { return upper - lower; }
};

/// +- sqrt(Delta^2 + (g/2)^2).
DressedEnergies dressed_energies(double detuning, double coupling);

struct EvolutionOptions {
    /// Keep populations every `record_stride` samples; 0 keeps only the end point.
    std::size_t record_stride = 1;
    /// Adaptive (RWA) integrator tolerances.
    double relative_tolerance = 1e-8;
    double absolute_tolerance = 1e-10;
    /// Fixed RK4 steps per field sample (lab frame).
    int substeps = 1;
};

struct EvolutionResult {
    std::vector<double> times;
    std::vector<double> populations;  ///< row-major [time][level]
    std::size_t level_count = 0;
    QuantumState final_state;
    double pg = 0.0;
    double pe = 0.0;
    double pf = 0.0;
    double leakage = 0.0;  ///< population in levels >= 3

    double population(std::size_t time_index, std::size_t level) const {
        return populations.at(time_index * level_count + level);
    }
};

/// Two-level rotating-wave evolution under H_LZ(t) with Delta and g linearly
/// interpolated between samples. Outside the unmasked span the populations
/// are frozen; masked gaps inside the span interpolate Delta linearly.
EvolutionResult evolve_rwa(const DriveSignals& drive, const QuantumState& initial,
                           const EvolutionOptions& options = {});

/// Full ladder driven by the real field, H = sum omega_n |n><n| +
/// d_eg E(t) sum sqrt(n+1) (|n><n+1| + h.c.). Fixed-step RK4 in the
/// interaction picture with cubic interpolation of the field between samples.
EvolutionResult evolve_lab_frame(const TransmonSpec& spec, const SampledWaveform& field,
                                 const QuantumState& initial, const EvolutionOptions& options = {});

/// CSV: t_ns, P0..P{N-1}.
void write_evolution_csv(std::ostream& out, const EvolutionResult& result);
/// JSON object with keys pg, pe, pf, leakage.
std::string evolution_summary_json(const EvolutionResult& result);

}  // namespace wgfocus
