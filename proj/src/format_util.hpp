#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

namespace swarmforecast::detail {

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

/// Strict full-string double parse; returns false on any trailing garbage.
inline bool parse_double(std::string_view text, double& out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc{} && res.ptr == end;
}

inline bool parse_unsigned(std::string_view text, unsigned long long& out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc{} && res.ptr == end;
}

} // namespace swarmforecast::detail
