#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <system_error>

namespace marvv {

/// Shortest decimal text that parses back to exactly the same double.
inline std::string fmt_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline void append_double(std::string& out, double v) {
    if (std::isnan(v)) {
        out += "nan";
        return;
    }
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

/// Parses a complete token as a double; false on trailing garbage or empty input.
inline bool parse_double(std::string_view s, double& out) {
    if (s == "nan") {
        out = std::nan("");
        return true;
    }
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

}  // namespace marvv
