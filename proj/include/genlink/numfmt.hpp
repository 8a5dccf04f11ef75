#pragma once

#include <charconv>
#include <string>

namespace genlink {

/// Shortest round-trip decimal rendering; used wherever numbers must be
/// byte-stable across runs.
inline std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace genlink
