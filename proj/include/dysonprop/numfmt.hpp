#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace dysonprop {

/// Round-trip text for a double: 17 significant digits, "%.17g".
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// JSON has no NaN/Inf; those become null.
inline std::string format_json_number(double x) {
    return std::isfinite(x) ? format_number(x) : std::string("null");
}

}  // namespace dysonprop
