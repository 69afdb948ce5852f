#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace relrank {

// Shortest decimal that round-trips the double, so emitted files are
// byte-stable across runs.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace relrank
