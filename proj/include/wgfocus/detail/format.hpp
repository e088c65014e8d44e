#pragma once

#include <charconv>
#include <string>
#include <string_view>

#include "wgfocus/errors.hpp"

namespace wgfocus::detail {

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, end);
}

inline double parse_double(std::string_view text, std::string_view what) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError("cannot parse number for " + std::string(what) + ": '" +
                          std::string(text) + "'");
    }
    return value;
}

}  // namespace wgfocus::detail
