#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "wgfocus/errors.hpp"
#include "wgfocus/pulse.hpp"
#include "wgfocus/units.hpp"
#include "wgfocus/waveform_io.hpp"

using namespace wgfocus;
using doctest::Approx;

namespace {

const DispersionModel wr90 = cutoff_from_geometry(WaveguideSpec{});

PulseSpec focused(double d_f, double sigma = 0.035) {
    return PulseSpec::centered_at(wr90, units::ghz_to_angular(7.2), sigma, d_f);
}

TimeGrid grid_for(const PulseSpec& spec, std::vector<double> z) {
    return plan_time_grid(spec, wr90, z);
}

double peak(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("high-pass factor") {
    auto spec = focused(0.15);
    const double kc = wr90.cutoff_wavevector();
    CHECK(highpass_factor(spec, wr90, kc) == Approx(std::exp(-0.01)));
    CHECK(highpass_factor(spec, wr90, 10 * kc) == Approx(std::exp(-1e-4)));
    // attenuation at 6.605 GHz with the geometric cutoff
    CHECK(highpass_factor(spec, wr90, wr90.k_of_omega(units::ghz_to_angular(6.605))) == Approx(0.5774).epsilon(1e-3));
    spec.highpass_enabled = false;
    CHECK(highpass_factor(spec, wr90, kc) == 1.0);
    CHECK(spectral_amplitude(spec, wr90, -1.0) == 0.0);
}

TEST_CASE("focal envelope peak equals E0") {
    auto spec = focused(0.0);
    spec.amplitude = 2.5;
    const auto grid = grid_for(spec, {0.0});
    const FieldSynthesizer synth(spec, wr90, grid);
    const auto sig = synth.analytic_signal_at(0.0);
    CHECK(sig.peak_envelope() == Approx(2.5).epsilon(1e-9));
    // t = 0 falls on a sample and carries the peak
    const auto it = std::max_element(sig.envelope.begin(), sig.envelope.end());
    CHECK(grid.time(static_cast<std::size_t>(it - sig.envelope.begin())) == Approx(0.0).scale(grid.step));
}

TEST_CASE("FFT synthesis matches direct integration") {
    const auto spec = focused(0.15);
    const auto grid = grid_for(spec, {0.0, 0.15});
    for (double z : {0.0, 0.15}) {
        const auto fft = field_at_position(spec, wr90, z, grid);
        const auto direct = synthesize_direct(spec, wr90, grid, z);
        double err = 0.0;
        for (std::size_t i = 0; i < fft.samples.size(); ++i) {
            err = std::max(err, std::abs(fft.samples[i] - direct.samples[i]));
        }
        CHECK(err / peak(fft.samples) < 1e-3);
    }
}

TEST_CASE("pulse is longer away from the focus") {
    const auto spec = focused(0.15);
    const auto grid = grid_for(spec, {0.0, 0.15});
    const FieldSynthesizer synth(spec, wr90, grid);
    const auto in = synth.analytic_signal_at(0.0);
    const auto focus = synth.analytic_signal_at(0.15);
    const double w_in = fwhm(grid.start, grid.step, in.envelope);
    const double w_focus = fwhm(grid.start, grid.step, focus.envelope);
    CHECK(w_in > 1.5 * w_focus);
    CHECK(focus.peak_envelope() > in.peak_envelope());
}

TEST_CASE("the input is up-chirped") {
    const auto spec = focused(0.15);
    const auto grid = grid_for(spec, {0.0, 0.15});
    const auto sig = FieldSynthesizer(spec, wr90, grid).analytic_signal_at(0.0);
    const auto it = std::max_element(sig.envelope.begin(), sig.envelope.end());
    const auto n = static_cast<std::size_t>(it - sig.envelope.begin());
    const auto half = static_cast<std::size_t>(0.5e-9 / grid.step);
    REQUIRE(sig.frequency_defined(n - half));
    REQUIRE(sig.frequency_defined(n + half));
    CHECK(sig.instantaneous_frequency[n + half] > sig.instantaneous_frequency[n - half]);
    CHECK_FALSE(sig.frequency_defined(0));
}

TEST_CASE("propagation conserves energy and reverses") {
    const auto spec = focused(0.15);
    const auto grid = grid_for(spec, {-0.3, 0.0, 0.15, 0.5});
    const auto input = field_at_position(spec, wr90, 0.0, grid);
    const auto moved = propagate(input, wr90, 0.15);
    const auto direct = field_at_position(spec, wr90, 0.15, grid);
    double err = 0.0;
    for (std::size_t i = 0; i < moved.samples.size(); ++i) {
        err = std::max(err, std::abs(moved.samples[i] - direct.samples[i]));
    }
    CHECK(err / peak(direct.samples) < 1e-9);
    CHECK(moved.energy() == Approx(input.energy()).epsilon(1e-9));
    const auto back = propagate(moved, wr90, -0.15);
    double rt = 0.0;
    for (std::size_t i = 0; i < back.samples.size(); ++i) {
        rt = std::max(rt, std::abs(back.samples[i] - input.samples[i]));
    }
    CHECK(rt / peak(input.samples) < 1e-9);
}

TEST_CASE("fwhm of a sampled Gaussian") {
    std::vector<double> t, g;
    for (int i = -200; i <= 200; ++i) {
        t.push_back(i * 0.01);
        g.push_back(std::exp(-0.5 * t.back() * t.back()));
    }
    CHECK(fwhm(t, g) == Approx(2.0 * std::sqrt(2.0 * std::log(2.0))).epsilon(1e-4));
    std::vector<double> edge(g.begin(), g.begin() + 201);
    CHECK_THROWS_AS(fwhm(std::span(t).first(201), edge), NumericError);
}

TEST_CASE("window check") {
    std::vector<double> env(1000, 0.0);
    env[500] = 1.0;
    CHECK(window_is_clear(env));
    env[2] = 0.01;
    CHECK_FALSE(window_is_clear(env));
}

TEST_CASE("pulse validation") {
    auto spec = focused(0.15);
    spec.spot_size_m = -1.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    CHECK_THROWS_AS(PulseSpec::centered_at(wr90, units::ghz_to_angular(6.0), 0.035, 0.1), ConfigError);
}

TEST_CASE("waveform files round-trip exactly") {
    const auto spec = focused(0.15);
    const auto grid = grid_for(spec, {0.0});
    const auto wave = field_at_position(spec, wr90, 0.0, grid);
    for (auto fmt : {WaveformFormat::text, WaveformFormat::binary}) {
        std::stringstream buf;
        write_waveform(buf, wave, fmt);
        const auto back = read_waveform(buf, fmt);
        CHECK(back.samples == wave.samples);
        CHECK(back.start_time == wave.start_time);
        CHECK(back.sample_period == wave.sample_period);
        CHECK(back.position_m == wave.position_m);
    }
}

TEST_CASE("truncated waveform file") {
    std::stringstream buf("sample_rate 1e9\nt0 0\nposition_m 0\ncount 5\n1\n2\n");
    CHECK_THROWS_AS(read_waveform(buf, WaveformFormat::text), IoError);
}

TEST_CASE("AWG resampling keeps the waveform") {
    const auto spec = focused(0.15);
    const auto grid = grid_for(spec, {0.0});
    const auto wave = field_at_position(spec, wr90, 0.0, grid);
    const double f_max = max_frequency_content(wave);
    CHECK(f_max > 7.2e9);
    CHECK(f_max < 20e9);
    const auto awg = resample_for_awg(wave, 65e9);
    CHECK(awg.sample_period == Approx(1.0 / 65e9));
    CHECK(awg.energy() == Approx(wave.energy()).epsilon(1e-3));
    CHECK_THROWS_AS(resample_for_awg(wave, 1.5 * f_max), ConfigError);
}

namespace {

double relative_l2(const SampledWaveform& a, const SampledWaveform& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        num += (a.samples[i] - b.samples[i]) * (a.samples[i] - b.samples[i]);
        den += a.samples[i] * a.samples[i];
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("FFT and direct synthesis agree in L2") {
    SUBCASE("narrow spectrum, default window") {
        const auto spec = focused(0.15, 0.10);
        const auto grid = grid_for(spec, {0.0, 0.15});
        for (double z : {0.0, 0.15}) {
            CHECK(relative_l2(field_at_position(spec, wr90, z, grid), synthesize_direct(spec, wr90, grid, z)) < 1e-6);
        }
    }
    SUBCASE("broad spectrum, window wide enough for the near-cutoff ringing") {
        // The FFT result is periodic; with the default edge threshold the
        // slow tail folds back at the 1e-5 level.
        const auto spec = focused(0.15);
        const auto grid = plan_time_grid(spec, wr90, std::vector<double>{0.0, 0.15}, 1e-7);
        CHECK(relative_l2(field_at_position(spec, wr90, 0.15, grid), synthesize_direct(spec, wr90, grid, 0.15, 6144)) <
              1e-6);
    }
}

TEST_CASE("synthesis is linear in E0") {
    auto spec = focused(0.15);
    const auto grid = grid_for(spec, {0.0});
    const auto one = field_at_position(spec, wr90, 0.0, grid);
    spec.amplitude = 3.0;
    const auto three = field_at_position(spec, wr90, 0.0, grid);
    double err = 0.0;
    for (std::size_t i = 0; i < one.samples.size(); ++i) err = std::max(err, std::abs(three.samples[i] - 3 * one.samples[i]));
    CHECK(err < 1e-12 * peak(three.samples));
    CHECK_THROWS_AS(plan_time_grid(spec, wr90, std::vector<double>{0.0}, 0.0), ConfigError);
}
