#pragma once

#include <stdexcept>
#include <string>

namespace synstdp {

/// Invalid parameters or configuration. Messages carry the offending
/// field path where one is known (e.g. "dendrites.n: must be >= 1").
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the fitting routines when the design is degenerate.
class FitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace detail
}  // namespace synstdp
