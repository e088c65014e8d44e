#include <doctest.h>

#include <string>

#include "wgfocus/config.hpp"
#include "wgfocus/errors.hpp"

using namespace wgfocus;
using doctest::Approx;

namespace {

bool rejects(const std::string& text, const std::string& fragment) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return std::string(e.what()).find(fragment) != std::string::npos;
    }
    return false;
}

}  // namespace

TEST_CASE("defaults") {
    const auto c = parse_config("");
    CHECK(c == Config{});
    CHECK(c.qubits.size() == 1);
}

TEST_CASE("unit suffixes convert to SI") {
    const auto c = parse_config(R"(
[waveguide]
broad_dim_mm = 22.86
[pulse]
central_frequency_ghz = 7.28
spot_size_cm = 2
focal_point_mm = 200
[qubits.1]
position_cm = 15
transition_frequency_ghz = 7.28
anharmonicity_mhz = 300
[qubits.2]
position_m = 0.2
transition_frequency_ghz = 7.28
[reflection]
enabled = true
return_loss_db = 15
point_cm = 25
[run]
compress_length_m = 1.0
)");
    CHECK(c.waveguide.broad_dim_m == Approx(0.02286));
    CHECK(c.pulse.central_frequency_hz == Approx(7.28e9));
    CHECK(c.pulse.spot_size_m == Approx(0.02));
    CHECK(c.pulse.focal_point_m == Approx(0.2));
    REQUIRE(c.qubits.size() == 2);
    CHECK(c.qubits[0].anharmonicity_hz == Approx(3e8));
    CHECK(c.reflection.amplitude == Approx(0.17782794));
    const auto sc = c.scenario();
    CHECK(sc.qubits[1].reflection.has_value());
    CHECK(sc.qubits[0].transmon.detuning == DetuningConvention::literal);
}

TEST_CASE("malformed configs name the problem") {
    CHECK(rejects("[pulse]\nspot_size = 0.035\n", "needs a unit suffix"));
    CHECK(rejects("[pulse]\nspot_size_furlong = 1\n", "spot_size_furlong"));
    CHECK(rejects("[pulse]\nspot_size_cm = 3\nspot_size_m = 0.03\n", "sets both"));
    CHECK(rejects("[pulsar]\n", "pulsar"));
    CHECK(rejects("[qubits.2]\nposition_m = 0.1\n", "qubits.1"));
    CHECK(rejects("[reflection]\namplitude = 0.1\npower_percent = 3\n", "only one"));
    CHECK(rejects("[pulse]\nspot_size_cm = \"wide\"\n", "must be a number"));
    CHECK(rejects("[pulse]\nspot_size_cm = -1\n", "spot"));
    CHECK(rejects("[run]\nname = \"../evil\"\n", "name"));
    CHECK(rejects("[pulse\n", "config:1"));
    CHECK(rejects("[run]\nmodel = \"exact\"\n", "model"));
    CHECK(rejects("[run]\ndetuning = \"half\"\n", "detuning"));
}

TEST_CASE("serialize then parse is the identity") {
    Config c;
    c.pulse.spot_size_m = 0.0213;
    c.qubits.push_back({0.2, 7.28e9, 3e8, 3});
    c.reflection.enabled = true;
    c.reflection.amplitude = 0.1;
    c.reflection.qubits = {2};
    c.sweep.amplitude_center_hz = 1.23456789e9;
    c.run.name = "trial-3";
    c.run.workers = 4;
    c.run.detuning = "rotating_frame";
    const auto text = serialize_config(c);
    CHECK(parse_config(text) == c);
    CHECK(serialize_config(parse_config(text)) == text);
}

TEST_CASE("safe names") {
    CHECK(is_safe_name("run_1.a-b"));
    CHECK_FALSE(is_safe_name(""));
    CHECK_FALSE(is_safe_name(".hidden"));
    CHECK_FALSE(is_safe_name("a/b"));
    CHECK_FALSE(is_safe_name("a b"));
}
