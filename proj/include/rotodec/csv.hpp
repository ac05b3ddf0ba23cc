// Deterministic text formatting for the CSV surface and reports: fixed
// 17-significant-digit scientific notation, '\n' line endings, "inf"/"nan"
// spelled out.
#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace rotodec {

inline std::string format_sci(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline std::string format_int(long long v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%lld", v);
    return buf;
}

} // namespace rotodec
