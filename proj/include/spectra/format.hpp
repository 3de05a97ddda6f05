#pragma once

#include <charconv>
#include <string>

namespace spectra {

// Shortest round-trip decimal form, locale independent ("1", "0.5", "1e-30").
inline std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace spectra
