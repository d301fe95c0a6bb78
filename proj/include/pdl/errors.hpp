#pragma once

#include <stdexcept>
#include <string>

namespace pdl {

// Process exit codes used by the CLI front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitAssumptionError = 3,
  kExitConsistencyError = 4,
};

// Malformed or contradictory user input (config files, CLI flags, game files).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A theory precondition (interdependence, Condition 1/2, ...) fails in strict mode.
struct AssumptionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Internal invariant broken: rows not stochastic, residual too large, overflow, ...
struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// State enumeration exceeded its cap. Carries the cap so callers can report it.
struct SizeError : std::runtime_error {
  SizeError(const std::string& what, std::size_t cap) : std::runtime_error(what), cap(cap) {}
  std::size_t cap;
};

}  // namespace pdl
