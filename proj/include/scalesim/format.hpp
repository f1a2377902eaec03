#pragma once

#include <cstdio>
#include <string>

namespace scalesim {

/// Shortest-safe lossless decimal form: 17 significant digits.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace scalesim
