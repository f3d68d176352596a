#pragma once

#include <cstdio>
#include <string>

namespace hfh {

// Round-trip exact decimal form used in every CSV/JSON artifact.
inline std::string fmt17(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace hfh
