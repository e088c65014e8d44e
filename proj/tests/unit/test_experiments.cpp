#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "wgfocus/errors.hpp"
#include "wgfocus/experiments.hpp"

using namespace wgfocus;
using doctest::Approx;

TEST_CASE("axes") {
    const auto lin = linear_axis(0.0, 0.4, 0.005);
    CHECK(lin.size() == 81);
    CHECK(lin.back() == Approx(0.4));
    const auto lg = log_axis(5.0, 1.5, 21);
    CHECK(lg.size() == 21);
    CHECK(lg[10] == Approx(5.0));
    CHECK(lg.back() / lg.front() == Approx(std::pow(10.0, 1.5)));
    CHECK_THROWS_AS(linear_axis(0.0, 1.0, 0.0), ConfigError);
}

TEST_CASE("a-priori amplitude gives a 2 pi area") {
    const auto sc = Scenario::single_qubit();
    // The slow near-cutoff tail keeps the envelope area nearly flat below
    // ~5 cm, so a* is not simply proportional to 1/sigma_f.
    CHECK(a_priori_amplitude(sc, 0.035) == Approx(5.0019e9).epsilon(2e-3));
    CHECK(a_priori_amplitude(sc, 0.07) == Approx(4.1818e9).epsilon(2e-3));
    CHECK(a_priori_amplitude(sc, 0.10) == Approx(3.0485e9).epsilon(2e-3));
}

TEST_CASE("revival width of a synthetic Gaussian") {
    std::vector<double> z, pg;
    const double s = 0.06;
    for (int i = -100; i <= 100; ++i) {
        z.push_back(0.15 + i * 0.005);
        const double x = z.back() - 0.15;
        pg.push_back(0.1 + 0.8 * std::exp(-x * x / (2 * s * s)));
    }
    const auto r = fit_revival(z, pg);
    CHECK(r.baseline == Approx(0.1).epsilon(1e-6));
    CHECK(r.peak == Approx(0.9));
    CHECK(r.peak_position == Approx(0.15));
    CHECK(r.width == Approx(2 * std::sqrt(2 * std::log(2.0)) * s).epsilon(2e-3));

    std::vector<double> flat(z.size(), 0.3);
    CHECK_THROWS_AS(spatial_resolution(z, flat), NumericError);
}

TEST_CASE("contrast and optimal amplitude") {
    PopulationMap m;
    m.focal_points = linear_axis(0.0, 0.4, 0.05);
    m.amplitudes = {1.0, 2.0, 3.0};
    m.spot_sizes = {0.035};
    m.qubit_count = 1;
    m.qubit_positions = {0.15};
    m.pg.assign(m.size(), 0.0);
    m.pe = m.pf = m.leak = m.pg;
    // amplitude 0: flat; 1 and 2: revival of height 0.7 over 0.1 baseline
    for (std::size_t f = 0; f < m.focal_points.size(); ++f) {
        const bool at_q = std::abs(m.focal_points[f] - 0.15) < 1e-9;
        m.pg[m.index(0, f, 0, 0)] = 0.5;
        m.pg[m.index(0, f, 1, 0)] = at_q ? 0.8 : 0.1;
        m.pg[m.index(0, f, 2, 0)] = at_q ? 0.8 : 0.1;
    }
    CHECK(contrast(m, 0, 0, 0, 0.1) == Approx(0.0));
    CHECK(contrast(m, 0, 1, 0, 0.1) == Approx(0.7));
    const auto best = optimal_amplitude(m, 0, 0);
    CHECK(best.index == 1);  // tie goes to the lower amplitude
    CHECK(best.amplitude == 2.0);

    for (std::size_t a = 1; a < 3; ++a)
        for (std::size_t f = 0; f < m.focal_points.size(); ++f) m.pg[m.index(0, f, a, 0)] = 0.5;
    CHECK_THROWS_AS(optimal_amplitude(m, 0, 0), NumericError);
}

TEST_CASE("l2 distance") {
    const std::vector<double> z = {0.0, 0.1, 0.2, 0.3};
    const std::vector<double> a = {0, 0, 0, 0}, b = {1, 1, 1, 1};
    CHECK(l2_distance(z, a, b) == Approx(std::sqrt(0.4)));
    CHECK(l2_distance(z, a, a) == 0.0);
}

TEST_CASE("scenario validation") {
    auto sc = Scenario::two_qubit();
    CHECK_NOTHROW(sc.validate());
    sc.qubits[1].transmon.position_m = 0.3;  // beyond L = 0.25
    CHECK_THROWS_AS(sc.validate(), ConfigError);
    sc = Scenario::single_qubit();
    sc.qubits[0].reflection = ReflectionSpec{0.1, 0.1, 1};
    CHECK_THROWS_AS(sc.validate(), ConfigError);
}

TEST_CASE("small sweep is deterministic and closed") {
    const auto sc = Scenario::single_qubit();
    SweepGrid grid;
    grid.focal_points = linear_axis(0.05, 0.25, 0.05);
    grid.amplitudes = {a_priori_amplitude(sc, 0.035), 2 * a_priori_amplitude(sc, 0.035)};
    grid.spot_sizes = {0.035};
    const auto one = sweep_focal_amplitude(sc, grid, {1});
    const auto three = sweep_focal_amplitude(sc, grid, {3});
    CHECK(one.pg == three.pg);
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one.pg[i] + one.pe[i] == Approx(1.0).epsilon(1e-6));
    }
    // the pulse inverts less when it is focused on the qubit at this amplitude
    const auto row = one.ground_row(0, 1, 0);
    CHECK(row[2] > row[0]);

    std::ostringstream a, b;
    write_population_map_csv(a, one);
    write_population_map_csv(b, three);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("d_f_m,amplitude,sigma_f_m,qubit,pg,pe,pf,leak\n", 0) == 0);
}

TEST_CASE("bad grids") {
    const auto sc = Scenario::single_qubit();
    SweepGrid grid;
    grid.focal_points = {0.1, 0.05};
    grid.amplitudes = {1e9};
    grid.spot_sizes = {0.035};
    CHECK_THROWS_AS(sweep_focal_amplitude(sc, grid, {1}), ConfigError);
}

TEST_CASE("compression ratio grows with length") {
    const auto sc = Scenario::single_qubit();
    const auto short_guide = compression_experiment(sc, 0.25);
    const auto long_guide = compression_experiment(sc, 1.03);
    CHECK(long_guide.ratio > short_guide.ratio);
    CHECK(long_guide.focal_fwhm_s == Approx(short_guide.focal_fwhm_s).epsilon(1e-3));
}

TEST_CASE("qubits in a two-qubit scenario do not see each other") {
    const auto two = Scenario::two_qubit();
    SweepGrid grid;
    grid.focal_points = linear_axis(0.1, 0.25, 0.05);
    grid.amplitudes = {a_priori_amplitude(two, 0.035), 2 * a_priori_amplitude(two, 0.035)};
    grid.spot_sizes = {0.035};
    const auto both = sweep_focal_amplitude(two, grid, {1});
    for (std::size_t q = 0; q < 2; ++q) {
        auto one = two;
        one.qubits = {two.qubits[q]};
        const auto single = sweep_focal_amplitude(one, grid, {1});
        for (std::size_t a = 0; a < 2; ++a) {
            const auto x = both.ground_row(0, a, q);
            const auto y = single.ground_row(0, a, 0);
            for (std::size_t f = 0; f < x.size(); ++f) CHECK(x[f] == Approx(y[f]).epsilon(1e-6));
        }
    }
}

TEST_CASE("sigma_q is stable under d_f refinement") {
    const auto sc = Scenario::single_qubit();
    const auto aopt = 1.995 * a_priori_amplitude(sc, 0.035);
    double width[2];
    for (int i = 0; i < 2; ++i) {
        SweepGrid grid;
        grid.focal_points = linear_axis(-0.35, 0.65, i == 0 ? 0.01 : 0.005);
        grid.amplitudes = {aopt};
        grid.spot_sizes = {0.035};
        const auto map = sweep_focal_amplitude(sc, grid, {0});
        width[i] = spatial_resolution(map.focal_points, map.ground_row(0, 0, 0));
    }
    CHECK(width[1] == Approx(width[0]).epsilon(0.05));
    CHECK(width[1] == Approx(0.1565).epsilon(0.01));
}
