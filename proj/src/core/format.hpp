// Deterministic shortest round-trip formatting for doubles (CSV and JSON
// output must be byte-stable across platforms and runs).
#pragma once

#include <charconv>
#include <string>

namespace rfts {

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace rfts
