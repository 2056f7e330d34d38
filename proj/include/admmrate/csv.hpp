#pragma once

#include <cstdio>
#include <optional>
#include <string>

namespace admmrate {

// Locale-independent, fixed-precision number rendering for CSV output.
inline std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline std::string csv_number(const std::optional<double>& x) {
  return x ? csv_number(*x) : std::string();
}

}  // namespace admmrate
