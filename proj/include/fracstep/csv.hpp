#pragma once

#include <cstdio>
#include <string>

namespace fracstep {

/// Doubles are written with 17 significant digits (%.16e) so that CSV output
/// round-trips bit-exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

}  // namespace fracstep
