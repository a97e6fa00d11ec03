#pragma once

#include <stdexcept>
#include <string>

namespace tips {

// Raised when a proposal or simulation exceeds its configured step cap.
struct StepCapError : std::runtime_error {
  explicit StepCapError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a guidance potential violates its validity conditions at run
// time, e.g. a non-target state with no potential-decreasing neighbor.
struct PotentialError : std::runtime_error {
  explicit PotentialError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an entire particle population carries zero weight.
struct WeightCollapseError : std::runtime_error {
  WeightCollapseError(const std::string& what, long generation_index)
      : std::runtime_error(what), generation(generation_index) {}
  long generation;
};

// Raised when a pseudo-marginal chain cannot obtain a finite initial
// likelihood estimate within its retry budget.
struct StartupError : std::runtime_error {
  explicit StartupError(const std::string& what) : std::runtime_error(what) {}
};

// Raised on malformed or out-of-range run configuration.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a command needs an exact reference value but the state space
// cannot be enumerated under the configured bound.
struct OracleUnavailableError : std::runtime_error {
  explicit OracleUnavailableError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace tips
