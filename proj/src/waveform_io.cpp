#include "wgfocus/waveform_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "wgfocus/detail/format.hpp"
#include "wgfocus/errors.hpp"

namespace wgfocus {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put_le(std::ostream& out, T value) {
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes.begin(), bytes.end());
    }
    out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
    std::array<char, sizeof(T)> bytes;
    if (!in.read(bytes.data(), bytes.size())) throw IoError("binary waveform: truncated file");
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes.begin(), bytes.end());
    }
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

std::string expect_line(std::istream& in, const std::string& key) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("text waveform: missing '" + key + "' line");
    if (line.rfind(key + " ", 0) != 0) {
        throw IoError("text waveform: expected '" + key + "', got '" + line + "'");
    }
    return line.substr(key.size() + 1);
}

double parse_field(const std::string& text, const char* what) {
    try {
        return detail::parse_double(text, what);
    } catch (const ConfigError& e) {
        throw IoError(std::string("text waveform: ") + e.what());
    }
}

}  // namespace

void write_waveform(std::ostream& out, const SampledWaveform& wave, WaveformFormat format) {
    const double rate = 1.0 / wave.sample_period;
    if (format == WaveformFormat::binary) {
        put_le<double>(out, rate);
        put_le<double>(out, wave.start_time);
        put_le<double>(out, wave.position_m);
        put_le<std::uint64_t>(out, wave.samples.size());
        for (double x : wave.samples) put_le<double>(out, x);
    } else {
        out << "sample_rate " << detail::format_double(rate) << '\n'
            << "t0 " << detail::format_double(wave.start_time) << '\n'
            << "position_m " << detail::format_double(wave.position_m) << '\n'
            << "count " << wave.samples.size() << '\n';
        for (double x : wave.samples) out << detail::format_double(x) << '\n';
    }
    if (!out) throw IoError("failed writing waveform");
}

void write_waveform(const std::filesystem::path& path, const SampledWaveform& wave,
                    WaveformFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_waveform(out, wave, format);
}

SampledWaveform read_waveform(std::istream& in, WaveformFormat format) {
    SampledWaveform wave;
    if (format == WaveformFormat::binary) {
        const double rate = get_le<double>(in);
        wave.start_time = get_le<double>(in);
        wave.position_m = get_le<double>(in);
        const auto count = get_le<std::uint64_t>(in);
        if (!(rate > 0.0)) throw IoError("binary waveform: non-positive sample rate");
        wave.sample_period = 1.0 / rate;
        wave.samples.resize(count);
        for (auto& x : wave.samples) x = get_le<double>(in);
        return wave;
    }
    const double rate = parse_field(expect_line(in, "sample_rate"), "sample_rate");
    wave.start_time = parse_field(expect_line(in, "t0"), "t0");
    wave.position_m = parse_field(expect_line(in, "position_m"), "position_m");
    const double count = parse_field(expect_line(in, "count"), "count");
    if (!(rate > 0.0)) throw IoError("text waveform: non-positive sample rate");
    if (count < 0 || count != std::floor(count)) throw IoError("text waveform: bad count");
    wave.sample_period = 1.0 / rate;
    wave.samples.reserve(static_cast<std::size_t>(count));
    std::string line;
    while (wave.samples.size() < static_cast<std::size_t>(count) && std::getline(in, line)) {
        if (line.empty()) continue;
        wave.samples.push_back(parse_field(line, "sample"));
    }
    if (wave.samples.size() != static_cast<std::size_t>(count)) {
        throw IoError("text waveform: expected " + std::to_string(static_cast<std::size_t>(count)) +
                      " samples, found " + std::to_string(wave.samples.size()));
    }
    return wave;
}

SampledWaveform read_waveform(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char head[11] = {};
    in.read(head, sizeof(head));
    const bool text = in.gcount() == sizeof(head) && std::memcmp(head, "sample_rate", 11) == 0;
    in.clear();
    in.seekg(0);
    return read_waveform(in, text ? WaveformFormat::text : WaveformFormat::binary);
}

void write_spectrum_csv(std::ostream& out, const SpectralField& field, const DispersionModel& model) {
    out << "k_rad_per_m,f_GHz,re,im\n";
    for (std::size_t i = 0; i < field.k.size(); ++i) {
        const double f_ghz = units::angular_to_ghz(model.omega_of_k(field.k[i]));
        out << detail::format_double(field.k[i]) << ',' << detail::format_double(f_ghz) << ','
            << detail::format_double(field.amplitude[i].real()) << ','
            << detail::format_double(field.amplitude[i].imag()) << '\n';
    }
}

}  // namespace wgfocus
