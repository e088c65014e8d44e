#include "wgfocus/validation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "wgfocus/detail/format.hpp"
#include "wgfocus/errors.hpp"

namespace wgfocus {
namespace {

CheckResult check(std::string name, double value, double tolerance, std::string detail = {}) {
    return {std::move(name), value < tolerance, value, tolerance, std::move(detail)};
}

double relative_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

void dispersion_checks(const Config& config, std::vector<CheckResult>& out) {
    const auto model = config.scenario().dispersion();
    const double wc = model.cutoff_angular_frequency();
    const double c = model.medium_speed();
    double product = 0.0, finite_diff = 0.0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        const double w = wc * 1.001 * std::pow(10.0 / 1.001, static_cast<double>(i) / (n - 1));
        const double vg = model.group_velocity(w);
        product = std::max(product, std::abs(model.phase_velocity(w) * vg / (c * c) - 1.0));
        const double k = model.k_of_omega(w);
        const double h = 1e-5 * k;
        const double fd = (model.omega_of_k(k + h) - model.omega_of_k(k - h)) / (2.0 * h);
        finite_diff = std::max(finite_diff, std::abs(fd / vg - 1.0));
    }
    out.push_back(check("phase_group_product", product, 1e-12, "max |v_p v_g / c^2 - 1|"));
    out.push_back(check("group_velocity_finite_difference", finite_diff, 1e-6, "max relative error"));
}

void propagation_checks(const Config& config, std::vector<CheckResult>& out) {
    const auto sc = config.scenario();
    const auto model = sc.dispersion();
    const auto spec = sc.pulse();
    const double dz = 0.5;
    const std::vector<double> positions = {0.0, dz};
    const auto grid = plan_time_grid(spec, model, positions);
    const auto input = field_at_position(spec, model, 0.0, grid);
    const auto moved = propagate(input, model, dz);
    const auto back = propagate(moved, model, -dz);
    out.push_back(check("propagation_energy", std::abs(moved.energy() / input.energy() - 1.0), 1e-9,
                        "relative energy change over 0.5 m"));
    out.push_back(check("propagation_round_trip", relative_l2(back.samples, input.samples), 1e-8,
                        "relative L2 error, +0.5 m then -0.5 m"));
}

void dynamics_checks(const Config& config, std::vector<CheckResult>& out) {
    // Constant resonant drive for t = pi / g.
    const double g = 2.0 * std::numbers::pi * 50e6;
    const std::size_t n = 2001;
    DriveSignals pi;
    pi.sample_period = (std::numbers::pi / g) / static_cast<double>(n - 1);
    pi.detuning.assign(n, 0.0);
    pi.coupling.assign(n, g);
    pi.field.assign(n, 0.0);
    const auto flip = evolve_rwa(pi, QuantumState::ground(2));
    out.push_back(check("pi_pulse", std::abs(flip.pe - 1.0), 1e-6, "|P_e - 1| after a pi pulse"));

    // Chirped focal drive at the first qubit, all samples recorded.
    const auto sc = config.scenario();
    const auto& site = sc.qubits.front();
    auto spec = sc.pulse(site.transmon.position_m, sc.spot_size_m);
    spec.amplitude = 1.0;
    const auto model = sc.dispersion();
    const double z = site.transmon.position_m;
    const auto grid = plan_time_grid(spec, model, std::span<const double>(&z, 1));
    const FieldSynthesizer synth(spec, model, grid);
    TransmonSpec t = site.transmon;
    t.dipole_scale = 2.0 * a_priori_amplitude(sc, sc.spot_size_m);
    const auto result = evolve_rwa(drive_signals(synth.analytic_signal_at(z), t), QuantumState::ground(2));
    double worst = 0.0;
    for (std::size_t i = 0; i < result.times.size(); ++i) {
        worst = std::max(worst, std::abs(result.population(i, 0) + result.population(i, 1) - 1.0));
    }
    out.push_back(check("rwa_norm", worst, 1e-6, "max |sum P - 1| over the trajectory"));

    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> dist(-1e10, 1e10);
    double dressed = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double delta = dist(rng);
        const double coupling = std::abs(dist(rng));
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(lz_hamiltonian(delta, coupling));
        const auto e = dressed_energies(delta, coupling);
        const double scale = std::max(e.upper, 1e-300);
        dressed = std::max({dressed, std::abs(solver.eigenvalues()(0) - e.lower) / scale,
                            std::abs(solver.eigenvalues()(1) - e.upper) / scale});
    }
    out.push_back(check("dressed_energies", dressed, 1e-12, "1000 random (Delta, g) vs eigensolver"));
}

void config_checks(const Config& config, std::vector<CheckResult>& out) {
    const bool same = parse_config(serialize_config(config)) == config;
    out.push_back(check("config_round_trip", same ? 0.0 : 1.0, 0.5, "parse(serialize(c)) == c"));
}

}  // namespace

std::vector<CheckResult> run_invariant_checks(const Config& config) {
    std::vector<CheckResult> out;
    auto guarded = [&](const char* name, auto&& fn) {
        try {
            fn(config, out);
        } catch (const Error& e) {
            out.push_back({name, false, 0.0, 0.0, e.what()});
        }
    };
    guarded("dispersion", dispersion_checks);
    guarded("propagation", propagation_checks);
    guarded("dynamics", dynamics_checks);
    guarded("config", config_checks);
    return out;
}

}  // namespace wgfocus
