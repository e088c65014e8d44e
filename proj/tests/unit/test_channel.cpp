#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "wgfocus/channel.hpp"
#include "wgfocus/errors.hpp"
#include "wgfocus/units.hpp"

using namespace wgfocus;
using doctest::Approx;

namespace {

const DispersionModel wr90 = cutoff_from_geometry(WaveguideSpec{});

struct Setup {
    PulseSpec spec = PulseSpec::centered_at(wr90, units::ghz_to_angular(7.2), 0.035, 0.15);
    TimeGrid grid = plan_time_grid(spec, wr90, std::vector<double>{0.15, 0.35});
    FieldSynthesizer synth{spec, wr90, grid};
};

double centroid(const Setup& s, const std::vector<std::complex<double>>& v) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        num += s.grid.time(i) * std::norm(v[i]);
        den += std::norm(v[i]);
    }
    return num / den;
}

}  // namespace

TEST_CASE("reflection coefficient conversions") {
    CHECK(reflection_amplitude_from_power_percent(3.0) == Approx(0.17320508));
    CHECK(reflection_amplitude_from_power_percent(10.0) == Approx(0.31622777));
    CHECK(reflection_amplitude_from_return_loss_db(15.0) == Approx(0.17782794));
    CHECK(reflection_amplitude_from_return_loss_db(-20.0) == Approx(0.1));
}

TEST_CASE("reflection spec validation") {
    ReflectionSpec r{1.0, 0.25, 1};
    CHECK_THROWS_AS(r.validate(), ConfigError);
    r = {0.1, 0.25, 0};
    CHECK_THROWS_AS(r.validate(), ConfigError);
    CHECK(image_position(0.15, {0.1, 0.25, 1}) == Approx(0.35));
}

TEST_CASE("echo is linear in r") {
    Setup s;
    const auto direct = s.synth.analytic_displaced(0.0);
    const auto a = analytic_with_reflection(s.synth, 0.15, {0.1, 0.25, 1});
    const auto b = analytic_with_reflection(s.synth, 0.15, {0.3, 0.25, 1});
    const auto c = analytic_with_reflection(s.synth, 0.15, {0.3, 0.25, -1});
    double err = 0, sign = 0;
    for (std::size_t i = 0; i < direct.size(); ++i) {
        err = std::max(err, std::abs((b[i] - direct[i]) - 3.0 * (a[i] - direct[i])));
        sign = std::max(sign, std::abs((c[i] - direct[i]) + (b[i] - direct[i])));
    }
    CHECK(err < 1e-12);
    CHECK(sign < 1e-12);
}

TEST_CASE("echo is bounded and delayed by the round trip") {
    Setup s;
    const double zq = 0.15, zr = 0.25, r = 0.3;
    const auto direct = s.synth.analytic_displaced(zq - 0.15);
    const auto total = analytic_with_reflection(s.synth, zq, {r, zr, 1});
    std::vector<std::complex<double>> echo(total.size());
    double peak_direct = 0, peak_total = 0;
    for (std::size_t i = 0; i < total.size(); ++i) {
        echo[i] = total[i] - direct[i];
        peak_direct = std::max(peak_direct, std::abs(direct[i]));
        peak_total = std::max(peak_total, std::abs(total[i]));
    }
    CHECK(peak_total <= (1 + r) * peak_direct);
    double e_direct = 0, e_total = 0;
    for (std::size_t i = 0; i < total.size(); ++i) {
        e_direct += std::norm(direct[i]);
        e_total += std::norm(total[i]);
    }
    CHECK(e_total <= (1 + r) * (1 + r) * e_direct);
    // the echo arrives after the main peak
    const auto argmax = [](const std::vector<std::complex<double>>& v) {
        return std::max_element(v.begin(), v.end(), [](auto a, auto b) { return std::abs(a) < std::abs(b); }) - v.begin();
    };
    CHECK(argmax(echo) > argmax(direct));
    const double delay = centroid(s, echo) - centroid(s, direct);
    const double expected = 2 * (zr - zq) / wr90.group_velocity(units::ghz_to_angular(7.2));
    CHECK(delay == Approx(expected).epsilon(0.03));
}

TEST_CASE("qubit must sit upstream of the reflection") {
    Setup s;
    CHECK_THROWS_AS(analytic_with_reflection(s.synth, 0.3, {0.1, 0.25, 1}), ConfigError);
    CHECK_THROWS_AS(field_with_reflection(s.spec, wr90, -0.1, {0.1, 0.25, 1}, s.grid), ConfigError);
}
