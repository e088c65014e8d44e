#include "wgfocus/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "wgfocus/detail/format.hpp"
#include "wgfocus/errors.hpp"
#include "wgfocus/units.hpp"

namespace wgfocus {

using detail::format_double;

namespace {

enum class Dim { length, frequency, time, speed };

struct Suffix {
    std::string_view text;
    double mul;
    double div;
};

std::span<const Suffix> suffixes(Dim dim) {
    static constexpr Suffix length[] = {{"m", 1, 1}, {"cm", 1, 100}, {"mm", 1, 1000}};
    static constexpr Suffix frequency[] = {{"hz", 1, 1}, {"khz", 1e3, 1}, {"mhz", 1e6, 1}, {"ghz", 1e9, 1}};
    static constexpr Suffix time[] = {{"s", 1, 1}, {"us", 1, 1e6}, {"ns", 1, 1e9}, {"ps", 1, 1e12}};
    static constexpr Suffix speed[] = {{"m_per_s", 1, 1}};
    switch (dim) {
        case Dim::length: return length;
        case Dim::frequency: return frequency;
        case Dim::time: return time;
        case Dim::speed: return speed;
    }
    return {};
}

std::string suffix_list(Dim dim) {
    std::string out;
    for (const auto& s : suffixes(dim)) {
        if (!out.empty()) out += ", ";
        out += "_";
        out += s.text;
    }
    return out;
}

std::string where(const toml::node& node) {
    const auto& src = node.source();
    return src.begin ? " (line " + std::to_string(src.begin.line) + ")" : "";
}

double as_number(const toml::node& node, const std::string& key) {
    if (!node.is_number()) throw ConfigError("key '" + key + "' must be a number" + where(node));
    return *node.value<double>();
}

/// Reads one TOML table, tracking which keys were consumed.
class Section {
public:
    Section(const toml::table& table, std::string name) : table_(table), name_(std::move(name)) {}

    std::optional<double> quantity(std::string_view base, Dim dim) {
        auto hit = find_quantity(base, dim);
        if (!hit) return std::nullopt;
        return as_number(*hit->first, hit->second.first) * hit->second.second.mul / hit->second.second.div;
    }

    std::optional<std::vector<double>> quantity_list(std::string_view base, Dim dim) {
        auto hit = find_quantity(base, dim);
        if (!hit) return std::nullopt;
        const auto& [key, suffix] = hit->second;
        const auto* array = hit->first->as_array();
        if (!array) throw ConfigError("key '" + key + "' must be an array" + where(*hit->first));
        std::vector<double> out;
        for (const auto& item : *array) out.push_back(as_number(item, key) * suffix.mul / suffix.div);
        return out;
    }

    std::optional<double> number(const std::string& key) {
        const auto* node = take(key);
        if (!node) return std::nullopt;
        return as_number(*node, key);
    }

    std::optional<std::vector<double>> number_list(const std::string& key) {
        const auto* node = take(key);
        if (!node) return std::nullopt;
        const auto* array = node->as_array();
        if (!array) throw ConfigError("key '" + key + "' must be an array" + where(*node));
        std::vector<double> out;
        for (const auto& item : *array) out.push_back(as_number(item, key));
        return out;
    }

    std::optional<long long> integer(const std::string& key) {
        const auto* node = take(key);
        if (!node) return std::nullopt;
        if (!node->is_integer()) throw ConfigError("key '" + key + "' must be an integer" + where(*node));
        return *node->value<long long>();
    }

    std::optional<std::vector<long long>> integer_list(const std::string& key) {
        const auto* node = take(key);
        if (!node) return std::nullopt;
        const auto* array = node->as_array();
        if (!array) throw ConfigError("key '" + key + "' must be an array" + where(*node));
        std::vector<long long> out;
        for (const auto& item : *array) {
            if (!item.is_integer()) throw ConfigError("key '" + key + "' must hold integers" + where(item));
            out.push_back(*item.value<long long>());
        }
        return out;
    }

    std::optional<bool> boolean(const std::string& key) {
        const auto* node = take(key);
        if (!node) return std::nullopt;
        if (!node->is_boolean()) throw ConfigError("key '" + key + "' must be true or false" + where(*node));
        return *node->value<bool>();
    }

    std::optional<std::string> string(const std::string& key) {
        const auto* node = take(key);
        if (!node) return std::nullopt;
        if (!node->is_string()) throw ConfigError("key '" + key + "' must be a string" + where(*node));
        return *node->value<std::string>();
    }

    /// Rejects keys nobody asked for.
    void finish() const {
        for (const auto& [key, node] : table_) {
            const std::string k(key.str());
            if (used_.count(k)) continue;
            if (auto it = physical_.find(k); it != physical_.end()) {
                throw ConfigError("key '" + k + "' in [" + name_ + "] needs a unit suffix (" +
                                  suffix_list(it->second) + ")" + where(node));
            }
            throw ConfigError("unknown key '" + k + "' in [" + name_ + "]" + where(node));
        }
    }

private:
    using Hit = std::pair<const toml::node*, std::pair<std::string, Suffix>>;

    const toml::node* take(const std::string& key) {
        const auto* node = table_.get(key);
        if (node) used_.insert(key);
        return node;
    }

    std::optional<Hit> find_quantity(std::string_view base, Dim dim) {
        physical_.emplace(std::string(base), dim);
        std::optional<Hit> hit;
        for (const auto& s : suffixes(dim)) {
            std::string key = std::string(base) + "_" + std::string(s.text);
            if (const auto* node = take(key)) {
                if (hit) {
                    throw ConfigError("[" + name_ + "] sets both '" + hit->second.first + "' and '" + key + "'");
                }
                hit = Hit{node, {key, s}};
            }
        }
        return hit;
    }

    const toml::table& table_;
    std::string name_;
    std::set<std::string> used_;
    std::map<std::string, Dim> physical_;
};

const toml::table& sub_table(const toml::table& root, const std::string& key, const toml::table& empty) {
    const auto* node = root.get(key);
    if (!node) return empty;
    const auto* table = node->as_table();
    if (!table) throw ConfigError("'" + key + "' must be a table" + where(*node));
    return *table;
}

int to_int(long long v, const char* what) {
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw ConfigError(std::string(what) + " out of range");
    }
    return static_cast<int>(v);
}

template <typename T>
void assign(T& target, std::optional<T> value) {
    if (value) target = std::move(*value);
}

void parse_waveguide(const toml::table& t, WaveguideConfig& c) {
    Section s(t, "waveguide");
    assign(c.broad_dim_m, s.quantity("broad_dim", Dim::length));
    assign(c.narrow_dim_m, s.quantity("narrow_dim", Dim::length));
    assign(c.length_m, s.quantity("length", Dim::length));
    assign(c.medium_speed_m_per_s, s.quantity("medium_speed", Dim::speed));
    s.finish();
}

void parse_pulse(const toml::table& t, PulseConfig& c) {
    Section s(t, "pulse");
    assign(c.central_frequency_hz, s.quantity("central_frequency", Dim::frequency));
    assign(c.spot_size_m, s.quantity("spot_size", Dim::length));
    assign(c.focal_point_m, s.quantity("focal_point", Dim::length));
    assign(c.amplitude, s.number("amplitude"));
    assign(c.highpass_coefficient, s.number("highpass_coefficient"));
    assign(c.highpass, s.boolean("highpass"));
    s.finish();
}

QubitConfig parse_qubit(const toml::table& t, const std::string& label) {
    QubitConfig c;
    Section s(t, "qubits." + label);
    assign(c.position_m, s.quantity("position", Dim::length));
    assign(c.transition_frequency_hz, s.quantity("transition_frequency", Dim::frequency));
    assign(c.anharmonicity_hz, s.quantity("anharmonicity", Dim::frequency));
    if (auto v = s.integer("levels")) c.levels = to_int(*v, "levels");
    s.finish();
    return c;
}

std::vector<QubitConfig> parse_qubits(const toml::table& t) {
    std::map<long long, QubitConfig> by_label;
    for (const auto& [key, node] : t) {
        const std::string label(key.str());
        long long n = 0;
        const auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), n);
        if (ec != std::errc{} || ptr != label.data() + label.size() || n < 1) {
            throw ConfigError("qubit sections must be named [qubits.1], [qubits.2], ...; got [qubits." +
                              label + "]");
        }
        const auto* table = node.as_table();
        if (!table) throw ConfigError("[qubits." + label + "] must be a table" + where(node));
        by_label.emplace(n, parse_qubit(*table, label));
    }
    std::vector<QubitConfig> out;
    for (const auto& [n, q] : by_label) {
        if (n != static_cast<long long>(out.size()) + 1) {
            throw ConfigError("qubit labels must run 1..N without gaps (missing qubits." +
                              std::to_string(out.size() + 1) + ")");
        }
        out.push_back(q);
    }
    return out;
}

void parse_reflection(const toml::table& t, ReflectionConfig& c) {
    Section s(t, "reflection");
    assign(c.enabled, s.boolean("enabled"));
    const auto r = s.number("amplitude");
    const auto percent = s.number("power_percent");
    const auto loss = s.number("return_loss_db");
    if ((r ? 1 : 0) + (percent ? 1 : 0) + (loss ? 1 : 0) > 1) {
        throw ConfigError("[reflection] takes only one of amplitude, power_percent, return_loss_db");
    }
    if (r) c.amplitude = *r;
    if (percent) c.amplitude = reflection_amplitude_from_power_percent(*percent);
    if (loss) c.amplitude = reflection_amplitude_from_return_loss_db(*loss);
    assign(c.point_m, s.quantity("point", Dim::length));
    if (auto v = s.integer("phase")) c.phase = to_int(*v, "phase");
    if (auto v = s.integer_list("qubits")) {
        c.qubits.clear();
        for (long long q : *v) c.qubits.push_back(to_int(q, "reflection qubit"));
    }
    s.finish();
}

void parse_sweep(const toml::table& t, SweepConfig& c) {
    Section s(t, "sweep");
    assign(c.focal_start_m, s.quantity("focal_start", Dim::length));
    assign(c.focal_stop_m, s.quantity("focal_stop", Dim::length));
    assign(c.focal_step_m, s.quantity("focal_step", Dim::length));
    if (auto v = s.quantity("amplitude_center", Dim::frequency)) c.amplitude_center_hz = *v;
    assign(c.amplitude_decades, s.number("amplitude_decades"));
    if (auto v = s.integer("amplitude_count")) c.amplitude_count = to_int(*v, "amplitude_count");
    assign(c.spot_sizes_m, s.quantity_list("spot_sizes", Dim::length));
    assign(c.resolution_half_range_m, s.quantity("resolution_half_range", Dim::length));
    assign(c.exclusion_half_width_m, s.quantity("exclusion_half_width", Dim::length));
    assign(c.reflection_amplitudes, s.number_list("reflection_amplitudes"));
    if (auto v = s.integer("qubit")) c.qubit = to_int(*v, "qubit");
    s.finish();
}

void parse_run(const toml::table& t, RunConfig& c) {
    Section s(t, "run");
    assign(c.name, s.string("name"));
    assign(c.model, s.string("model"));
    assign(c.detuning, s.string("detuning"));
    if (auto v = s.integer("workers")) {
        if (*v < 0) throw ConfigError("workers must be >= 0");
        c.workers = static_cast<unsigned>(to_int(*v, "workers"));
    }
    assign(c.output_dir, s.string("output_dir"));
    assign(c.compress_length_m, s.quantity("compress_length", Dim::length));
    assign(c.awg_sample_rate_hz, s.quantity("awg_sample_rate", Dim::frequency));
    s.finish();
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        if (static_cast<unsigned char>(ch) < 0x20) throw ConfigError("control character in string value");
        out += ch;
    }
    return out + "\"";
}

std::string number_list(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
    return out + "]";
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

}  // namespace

bool is_safe_name(std::string_view name) {
    if (name.empty() || name.size() > 128 || name.front() == '.') return false;
    return std::all_of(name.begin(), name.end(), [](char ch) {
        return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
               ch == '_' || ch == '-' || ch == '.';
    });
}

Config parse_config(std::string_view text, std::string_view source) {
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        throw ConfigError(std::string(source) + ":" + std::to_string(e.source().begin.line) + ": " +
                          std::string(e.description()));
    }
    static const std::set<std::string> sections = {"waveguide", "pulse", "qubits", "reflection", "sweep", "run"};
    for (const auto& [key, node] : root) {
        if (!sections.count(std::string(key.str()))) {
            throw ConfigError("unknown section or key '" + std::string(key.str()) + "'" + where(node));
        }
    }
    const toml::table empty;
    Config c;
    parse_waveguide(sub_table(root, "waveguide", empty), c.waveguide);
    parse_pulse(sub_table(root, "pulse", empty), c.pulse);
    if (root.get("qubits")) c.qubits = parse_qubits(sub_table(root, "qubits", empty));
    parse_reflection(sub_table(root, "reflection", empty), c.reflection);
    parse_sweep(sub_table(root, "sweep", empty), c.sweep);
    parse_run(sub_table(root, "run", empty), c.run);
    c.validate();
    return c;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

std::string serialize_config(const Config& c) {
    std::ostringstream out;
    const auto& w = c.waveguide;
    out << "[waveguide]\n"
        << "broad_dim_m = " << format_double(w.broad_dim_m) << '\n'
        << "narrow_dim_m = " << format_double(w.narrow_dim_m) << '\n'
        << "length_m = " << format_double(w.length_m) << '\n'
        << "medium_speed_m_per_s = " << format_double(w.medium_speed_m_per_s) << "\n\n";
    const auto& p = c.pulse;
    out << "[pulse]\n"
        << "central_frequency_hz = " << format_double(p.central_frequency_hz) << '\n'
        << "spot_size_m = " << format_double(p.spot_size_m) << '\n'
        << "focal_point_m = " << format_double(p.focal_point_m) << '\n'
        << "amplitude = " << format_double(p.amplitude) << '\n'
        << "highpass_coefficient = " << format_double(p.highpass_coefficient) << '\n'
        << "highpass = " << (p.highpass ? "true" : "false") << "\n\n";
    for (std::size_t i = 0; i < c.qubits.size(); ++i) {
        const auto& q = c.qubits[i];
        out << "[qubits." << (i + 1) << "]\n"
            << "position_m = " << format_double(q.position_m) << '\n'
            << "transition_frequency_hz = " << format_double(q.transition_frequency_hz) << '\n'
            << "anharmonicity_hz = " << format_double(q.anharmonicity_hz) << '\n'
            << "levels = " << q.levels << "\n\n";
    }
    const auto& r = c.reflection;
    out << "[reflection]\n"
        << "enabled = " << (r.enabled ? "true" : "false") << '\n'
        << "amplitude = " << format_double(r.amplitude) << '\n'
        << "point_m = " << format_double(r.point_m) << '\n'
        << "phase = " << r.phase << '\n'
        << "qubits = [";
    for (std::size_t i = 0; i < r.qubits.size(); ++i) out << (i ? ", " : "") << r.qubits[i];
    out << "]\n\n";
    const auto& s = c.sweep;
    out << "[sweep]\n"
        << "focal_start_m = " << format_double(s.focal_start_m) << '\n'
        << "focal_stop_m = " << format_double(s.focal_stop_m) << '\n'
        << "focal_step_m = " << format_double(s.focal_step_m) << '\n';
    if (s.amplitude_center_hz) out << "amplitude_center_hz = " << format_double(*s.amplitude_center_hz) << '\n';
    out << "amplitude_decades = " << format_double(s.amplitude_decades) << '\n'
        << "amplitude_count = " << s.amplitude_count << '\n'
        << "spot_sizes_m = " << number_list(s.spot_sizes_m) << '\n'
        << "resolution_half_range_m = " << format_double(s.resolution_half_range_m) << '\n'
        << "exclusion_half_width_m = " << format_double(s.exclusion_half_width_m) << '\n'
        << "reflection_amplitudes = " << number_list(s.reflection_amplitudes) << '\n'
        << "qubit = " << s.qubit << "\n\n";
    const auto& run = c.run;
    out << "[run]\n"
        << "name = " << quote(run.name) << '\n'
        << "model = " << quote(run.model) << '\n'
        << "detuning = " << quote(run.detuning) << '\n'
        << "workers = " << run.workers << '\n'
        << "output_dir = " << quote(run.output_dir) << '\n'
        << "compress_length_m = " << format_double(run.compress_length_m) << '\n'
        << "awg_sample_rate_hz = " << format_double(run.awg_sample_rate_hz) << '\n';
    return out.str();
}

void Config::validate() const {
    require(is_safe_name(run.name), "run name '" + run.name + "' may only use letters, digits, '_', '-' and '.'");
    parse_evolution_model(run.model);
    parse_detuning_convention(run.detuning);
    require(!qubits.empty(), "at least one qubit is required");
    require(run.compress_length_m > 0.0, "compress_length must be positive");
    require(run.awg_sample_rate_hz > 0.0, "awg_sample_rate must be positive");
    require(sweep.focal_step_m > 0.0, "focal_step must be positive");
    require(sweep.focal_stop_m >= sweep.focal_start_m, "focal_stop must not be below focal_start");
    require(sweep.amplitude_count >= 1, "amplitude_count must be at least 1");
    require(sweep.amplitude_decades >= 0.0, "amplitude_decades must be non-negative");
    require(!sweep.amplitude_center_hz || *sweep.amplitude_center_hz > 0.0, "amplitude_center must be positive");
    require(sweep.resolution_half_range_m > 0.0, "resolution_half_range must be positive");
    require(sweep.exclusion_half_width_m >= 0.0, "exclusion_half_width must be non-negative");
    require(!sweep.spot_sizes_m.empty(), "spot_sizes must not be empty");
    for (std::size_t i = 0; i < sweep.spot_sizes_m.size(); ++i) {
        require(sweep.spot_sizes_m[i] > 0.0, "spot sizes must be positive");
        require(i == 0 || sweep.spot_sizes_m[i] > sweep.spot_sizes_m[i - 1], "spot_sizes must be strictly increasing");
    }
    require(!sweep.reflection_amplitudes.empty() && sweep.reflection_amplitudes.front() == 0.0,
            "reflection_amplitudes must start with 0");
    for (double r : sweep.reflection_amplitudes) require(r >= 0.0 && r < 1.0, "reflection amplitudes must lie in [0, 1)");
    require(sweep.qubit >= 1 && static_cast<std::size_t>(sweep.qubit) <= qubits.size(),
            "sweep.qubit must name an existing qubit");
    for (int q : reflection.qubits) {
        require(q >= 1 && static_cast<std::size_t>(q) <= qubits.size(), "reflection.qubits names a missing qubit");
    }
    scenario().validate();
}

Scenario Config::scenario() const {
    Scenario s;
    s.name = run.name;
    s.waveguide = {waveguide.broad_dim_m, waveguide.narrow_dim_m, waveguide.length_m,
                   waveguide.medium_speed_m_per_s};
    s.central_frequency = units::hz_to_angular(pulse.central_frequency_hz);
    s.spot_size_m = pulse.spot_size_m;
    s.focal_point_m = pulse.focal_point_m;
    s.field_amplitude = pulse.amplitude;
    s.highpass_coefficient = pulse.highpass_coefficient;
    s.highpass_enabled = pulse.highpass;
    s.model = parse_evolution_model(run.model);
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        const auto& q = qubits[i];
        QubitSite site;
        site.transmon.transition_frequency = units::hz_to_angular(q.transition_frequency_hz);
        site.transmon.anharmonicity = units::hz_to_angular(q.anharmonicity_hz);
        site.transmon.level_count = q.levels;
        site.transmon.position_m = q.position_m;
        site.transmon.detuning = parse_detuning_convention(run.detuning);
        const int label = static_cast<int>(i) + 1;
        const bool listed = reflection.qubits.empty() ||
                            std::find(reflection.qubits.begin(), reflection.qubits.end(), label) !=
                                reflection.qubits.end();
        if (reflection.enabled && listed) {
            site.reflection = ReflectionSpec{reflection.amplitude, reflection.point_m, reflection.phase};
        }
        s.qubits.push_back(site);
    }
    return s;
}

SweepGrid Config::focal_grid() const {
    const auto sc = scenario();
    SweepGrid grid;
    grid.focal_points = linear_axis(sweep.focal_start_m, sweep.focal_stop_m, sweep.focal_step_m);
    grid.spot_sizes = {pulse.spot_size_m};
    const double center = sweep.amplitude_center_hz ? units::hz_to_angular(*sweep.amplitude_center_hz)
                                                    : a_priori_amplitude(sc, pulse.spot_size_m);
    grid.amplitudes = log_axis(center, sweep.amplitude_decades, static_cast<std::size_t>(sweep.amplitude_count));
    return grid;
}

}  // namespace wgfocus
