#include "wgfocus/dynamics.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <json.hpp>
#include <ostream>
#include <string>

#include "wgfocus/detail/format.hpp"
#include "wgfocus/errors.hpp"

namespace wgfocus {

namespace odeint = boost::numeric::odeint;

std::string to_string(DetuningConvention convention) {
    return convention == DetuningConvention::literal ? "literal" : "rotating_frame";
}

DetuningConvention parse_detuning_convention(const std::string& text) {
    if (text == "literal") return DetuningConvention::literal;
    if (text == "rotating_frame") return DetuningConvention::rotating_frame;
    throw ConfigError("unknown detuning convention '" + text + "' (expected literal or rotating_frame)");
}

void TransmonSpec::validate() const {
    if (!(transition_frequency > 0.0) || !std::isfinite(transition_frequency)) {
        throw ConfigError("transmon transition frequency must be positive");
    }
    if (!(anharmonicity >= 0.0) || !std::isfinite(anharmonicity)) {
        throw ConfigError("transmon anharmonicity must be finite and non-negative");
    }
    if (level_count < 2) throw ConfigError("transmon needs at least two levels");
    if (!(dipole_scale >= 0.0) || !std::isfinite(dipole_scale)) {
        throw ConfigError("dipole scale must be non-negative");
    }
    if (!std::isfinite(position_m)) throw ConfigError("transmon position must be finite");
    const auto levels = transmon_levels(*this);
    for (std::size_t n = 1; n < levels.size(); ++n) {
        if (!(levels[n] > levels[n - 1])) {
            throw ConfigError("anharmonicity too large: level " + std::to_string(n) +
                              " is not above level " + std::to_string(n - 1));
        }
    }
}

std::vector<double> transmon_levels(const TransmonSpec& spec) {
    std::vector<double> levels(static_cast<std::size_t>(std::max(spec.level_count, 0)));
    for (std::size_t n = 0; n < levels.size(); ++n) {
        const double nd = static_cast<double>(n);
        levels[n] = nd * spec.transition_frequency - spec.anharmonicity * nd * (nd - 1.0) / 2.0;
    }
    return levels;
}

QuantumState QuantumState::ground(int levels) {
    if (levels < 1) throw ConfigError("state needs at least one level");
    QuantumState s;
    s.amplitudes.assign(static_cast<std::size_t>(levels), {0.0, 0.0});
    s.amplitudes[0] = 1.0;
    return s;
}

double QuantumState::norm_squared() const {
    double sum = 0.0;
    for (const auto& c : amplitudes) sum += std::norm(c);
    return sum;
}

bool DriveSignals::defined(std::size_t n) const { return std::isfinite(detuning.at(n)); }

DriveSignals drive_signals(const AnalyticSignal& signal, const TransmonSpec& spec) {
    DriveSignals d;
    d.start_time = signal.start_time;
    d.sample_period = signal.sample_period;
    const std::size_t n = signal.size();
    d.detuning.resize(n);
    d.coupling.resize(n);
    d.field.resize(n);
    const double scale = spec.detuning == DetuningConvention::literal ? 1.0 : 0.5;
    for (std::size_t i = 0; i < n; ++i) {
        d.detuning[i] = signal.frequency_defined(i)
                            ? scale * (spec.transition_frequency - signal.instantaneous_frequency[i])
                            : std::nan("");
        d.coupling[i] = spec.dipole_scale * signal.envelope[i];
        d.field[i] = signal.values[i].real();
    }
    return d;
}

Eigen::Matrix2cd lz_hamiltonian(double detuning, double coupling) {
    Eigen::Matrix2cd h;
    h << detuning, coupling / 2.0, coupling / 2.0, -detuning;
    return h;
}

DressedEnergies dressed_energies(double detuning, double coupling) {
    const double r = std::hypot(detuning, coupling / 2.0);
    return {-r, r};
}

namespace {

void fill_summary(EvolutionResult& r) {
    const auto& s = r.final_state;
    r.pg = s.population(0);
    r.pe = s.levels() > 1 ? s.population(1) : 0.0;
    r.pf = s.levels() > 2 ? s.population(2) : 0.0;
    r.leakage = 0.0;
    for (std::size_t n = 3; n < s.levels(); ++n) r.leakage += s.population(n);
}

bool keep_sample(std::size_t i, std::size_t count, std::size_t stride) {
    if (stride == 0) return i + 1 == count;
    return i % stride == 0 || i + 1 == count;
}

void record(EvolutionResult& r, double t, const std::vector<std::complex<double>>& c) {
    r.times.push_back(t);
    for (const auto& a : c) r.populations.push_back(std::norm(a));
}

}  // namespace

EvolutionResult evolve_rwa(const DriveSignals& drive, const QuantumState& initial,
                           const EvolutionOptions& options) {
    if (initial.levels() != 2) throw ConfigError("RWA evolution needs a two-level state");
    const std::size_t n = drive.size();
    if (n < 2 || drive.detuning.size() != n) throw ConfigError("drive signal too short");
    if (!(drive.sample_period > 0.0)) throw ConfigError("drive sample period must be positive");

    EvolutionResult result;
    result.level_count = 2;

    std::size_t lo = n, hi = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (drive.defined(i)) {
            lo = std::min(lo, i);
            hi = i;
        }
    }

    // States per sample inside [lo, hi]; index 0 of the state array is the
    // ground level, index 1 the excited level.
    using State = std::array<std::complex<double>, 2>;
    std::vector<State> trace;
    if (lo < hi) {
        std::vector<double> det(drive.detuning.begin() + static_cast<std::ptrdiff_t>(lo),
                                drive.detuning.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
        std::size_t last = 0;
        for (std::size_t i = 1; i < det.size(); ++i) {
            if (!std::isfinite(det[i])) continue;
            for (std::size_t j = last + 1; j < i; ++j) {
                const double u = static_cast<double>(j - last) / static_cast<double>(i - last);
                det[j] = det[last] + u * (det[i] - det[last]);
            }
            last = i;
        }
        const double* g = drive.coupling.data() + lo;
        const double t0 = drive.start_time + static_cast<double>(lo) * drive.sample_period;
        const double dt = drive.sample_period;
        const std::size_t m = det.size();

        auto rhs = [&](const State& psi, State& dpsi, double t) {
            double u = (t - t0) / dt;
            auto i = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(m - 2)));
            u = std::clamp(u - static_cast<double>(i), 0.0, 1.0);
            const double delta = det[i] + u * (det[i + 1] - det[i]);
            const double half_g = 0.5 * (g[i] + u * (g[i + 1] - g[i]));
            const std::complex<double> mi{0.0, -1.0};
            dpsi[0] = mi * (-delta * psi[0] + half_g * psi[1]);
            dpsi[1] = mi * (half_g * psi[0] + delta * psi[1]);
        };

        std::vector<double> times(m);
        for (std::size_t i = 0; i < m; ++i) times[i] = t0 + static_cast<double>(i) * dt;
        trace.reserve(m);
        State psi{initial.amplitudes[0], initial.amplitudes[1]};
        using Stepper = odeint::runge_kutta_dopri5<State>;
        try {
            odeint::integrate_times(
                odeint::make_dense_output(options.absolute_tolerance, options.relative_tolerance, dt,
                                          Stepper()),
                rhs, psi, times.begin(), times.end(), dt,
                [&](const State& s, double) { trace.push_back(s); });
        } catch (const std::exception& e) {
            throw NumericError(std::string("RWA integration failed: ") + e.what());
        }
        if (trace.size() != m) throw NumericError("RWA integration stopped early");
    }

    std::vector<std::complex<double>> current = initial.amplitudes;
    for (std::size_t i = 0; i < n; ++i) {
        if (lo < hi && i >= lo && i <= hi) current = {trace[i - lo][0], trace[i - lo][1]};
        if (keep_sample(i, n, options.record_stride)) {
            record(result, drive.start_time + static_cast<double>(i) * drive.sample_period, current);
        }
    }
    result.final_state.amplitudes = current;
    if (!std::isfinite(result.final_state.norm_squared())) {
        throw NumericError("RWA integration produced a non-finite state");
    }
    fill_summary(result);
    return result;
}

EvolutionResult evolve_lab_frame(const TransmonSpec& spec, const SampledWaveform& field,
                                 const QuantumState& initial, const EvolutionOptions& options) {
    spec.validate();
    const auto levels = transmon_levels(spec);
    const std::size_t nl = levels.size();
    if (initial.levels() != nl) throw ConfigError("initial state does not match the level count");
    const std::size_t n = field.samples.size();
    if (n < 4) throw ConfigError("field too short for lab-frame evolution");
    if (!(field.sample_period > 0.0)) throw ConfigError("field sample period must be positive");
    if (options.substeps < 1) throw ConfigError("substeps must be at least 1");

    std::vector<double> nu(nl - 1);
    std::vector<double> root(nl - 1);
    for (std::size_t k = 0; k + 1 < nl; ++k) {
        nu[k] = levels[k + 1] - levels[k];
        root[k] = std::sqrt(static_cast<double>(k + 1));
    }
    const double f_top = std::max(max_frequency_content(field), nu.back() / units::kTwoPi);
    const double dt = field.sample_period;
    if (dt * 20.0 * f_top > 1.0 + 1e-12) {
        throw ConfigError("field sampling too coarse for lab-frame evolution: need dt <= " +
                          detail::format_double(1.0 / (20.0 * f_top)) + " s");
    }

    const auto& x = field.samples;
    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::abs(v));
    std::size_t lo = n, hi = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(x[i]) > 1e-7 * peak) {
            lo = std::min(lo, i);
            hi = i;
        }
    }
    if (lo <= hi) {
        lo = lo >= 2 ? lo - 2 : 0;
        hi = std::min(hi + 2, n - 1);
    }

    auto sample = [&](std::ptrdiff_t i) {
        return x[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1))];
    };
    // Cubic Lagrange through samples i-1..i+2, evaluated at i + u.
    auto interp = [&](std::size_t i, double u) {
        const auto ii = static_cast<std::ptrdiff_t>(i);
        const double a = sample(ii - 1), b = sample(ii), c = sample(ii + 1), d = sample(ii + 2);
        return -u * (u - 1.0) * (u - 2.0) / 6.0 * a + (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0 * b -
               (u + 1.0) * u * (u - 2.0) / 2.0 * c + (u + 1.0) * u * (u - 1.0) / 6.0 * d;
    };

    using Vec = std::vector<std::complex<double>>;
    const double coupling = spec.dipole_scale;
    const std::complex<double> mi{0.0, -1.0};
    // Interaction picture relative to the first grid time.
    auto rhs = [&](double tau, double e, const Vec& c, Vec& dc) {
        const double amp = coupling * e;
        for (std::size_t k = 0; k < nl; ++k) dc[k] = 0.0;
        for (std::size_t k = 0; k + 1 < nl; ++k) {
            const std::complex<double> p = std::polar(1.0, -nu[k] * tau);
            dc[k] += mi * amp * root[k] * p * c[k + 1];
            dc[k + 1] += mi * amp * root[k] * std::conj(p) * c[k];
        }
    };

    EvolutionResult result;
    result.level_count = nl;
    Vec c = initial.amplitudes;
    Vec k1(nl), k2(nl), k3(nl), k4(nl), tmp(nl);
    const int sub = options.substeps;
    const double h = dt / sub;
    for (std::size_t i = 0; i < n; ++i) {
        if (keep_sample(i, n, options.record_stride)) record(result, field.time(i), c);
        if (i + 1 == n || lo > hi || i < lo || i >= hi) continue;
        for (int s = 0; s < sub; ++s) {
            const double u0 = static_cast<double>(s) / sub;
            const double tau = (static_cast<double>(i) + u0) * dt;
            const double e0 = interp(i, u0);
            const double em = interp(i, u0 + 0.5 / sub);
            const double e1 = interp(i, u0 + 1.0 / sub);
            rhs(tau, e0, c, k1);
            for (std::size_t k = 0; k < nl; ++k) tmp[k] = c[k] + 0.5 * h * k1[k];
            rhs(tau + 0.5 * h, em, tmp, k2);
            for (std::size_t k = 0; k < nl; ++k) tmp[k] = c[k] + 0.5 * h * k2[k];
            rhs(tau + 0.5 * h, em, tmp, k3);
            for (std::size_t k = 0; k < nl; ++k) tmp[k] = c[k] + h * k3[k];
            rhs(tau + h, e1, tmp, k4);
            for (std::size_t k = 0; k < nl; ++k) {
                c[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
            }
        }
        double norm = 0.0;
        for (const auto& a : c) norm += std::norm(a);
        if (!std::isfinite(norm) || norm <= 0.0) {
            throw NumericError("lab-frame integration diverged at t = " +
                               detail::format_double(field.time(i)));
        }
        const double scale = 1.0 / std::sqrt(norm);
        for (auto& a : c) a *= scale;
    }

    const double span = static_cast<double>(n - 1) * dt;
    result.final_state.amplitudes.resize(nl);
    for (std::size_t k = 0; k < nl; ++k) {
        result.final_state.amplitudes[k] = std::polar(1.0, -levels[k] * span) * c[k];
    }
    fill_summary(result);
    return result;
}

void write_evolution_csv(std::ostream& out, const EvolutionResult& result) {
    out << "t_ns";
    for (std::size_t k = 0; k < result.level_count; ++k) out << ",P" << k;
    out << '\n';
    for (std::size_t i = 0; i < result.times.size(); ++i) {
        out << detail::format_double(result.times[i] * 1e9);
        for (std::size_t k = 0; k < result.level_count; ++k) {
            out << ',' << detail::format_double(result.population(i, k));
        }
        out << '\n';
    }
}

std::string evolution_summary_json(const EvolutionResult& result) {
    nlohmann::ordered_json j;
    j["pg"] = result.pg;
    j["pe"] = result.pe;
    j["pf"] = result.pf;
    j["leakage"] = result.leakage;
    return j.dump(2);
}

}  // namespace wgfocus
