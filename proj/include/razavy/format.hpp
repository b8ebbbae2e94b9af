#pragma once

#include <cstdio>
#include <string>

namespace razavy {

// Fixed 9-significant-digit rendering used for every emitted number, so that
// reports are byte-stable across runs and platforms with IEEE doubles.
inline std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace razavy
