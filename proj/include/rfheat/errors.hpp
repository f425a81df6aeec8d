#pragma once

#include <stdexcept>
#include <string>

namespace rfheat {

/// Metric became degenerate (or was asked for) beyond the existence horizon.
struct ExistenceTimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Explicit time stepping cannot satisfy the diffusion CFL restriction.
struct CflError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A field that must stay positive reached zero or below on the grid.
struct PositivityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A checker's hypothesis fails at some grid point; the message names it.
struct HypothesisViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed scenario configuration; carries the offending line when known.
struct ConfigError : std::runtime_error {
  int line = -1;
  explicit ConfigError(const std::string& msg, int line_no = -1)
      : std::runtime_error(line_no >= 0 ? msg + " (line " + std::to_string(line_no) + ")" : msg),
        line(line_no) {}
};

}  // namespace rfheat
