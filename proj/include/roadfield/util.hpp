#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace roadfield {

// Bad user-supplied configuration (file, flag, or parameter value).  The CLI
// maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation failed to meet its contract (solver did not converge, a
// precondition on the numerics was violated, ...).  CLI exit code 1.
class NumericsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest decimal that round-trips a double (17 significant digits).
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace roadfield
