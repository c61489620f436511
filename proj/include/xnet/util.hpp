#pragma once

#include <cstdio>
#include <cstdlib>

namespace xnet {

// Rounds to `digits` significant decimal digits; reports serialize reals
// through this so emitted JSON is stable across platforms.
inline double round_sig(double x, int digits = 12) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

}  // namespace xnet
