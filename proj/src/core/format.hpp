#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace plateau {

// Shortest round-trip decimal form; identical bytes for identical values.
inline std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt_long(long double v) {
  char buf[80];
  const int len = std::snprintf(buf, sizeof(buf), "%.21Lg", v);
  return std::string(buf, buf + len);
}

}  // namespace plateau
