#pragma once

#include <cstdio>
#include <string>

namespace pedflow::cli {

/// Shortest round-trip-safe text for a double, independent of the locale.
inline std::string num(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

}  // namespace pedflow::cli
