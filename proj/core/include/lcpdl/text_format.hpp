#pragma once

#include <cstdio>
#include <string>

namespace lcpdl::detail {

// Shortest text that is still unambiguous as a double: 17 significant digits,
// with ".0" appended to integral values so JSON readers keep them floating point.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace lcpdl::detail
