#pragma once

#include <stdexcept>
#include <string>

namespace archmix {

// Validation of user-supplied specs, arguments, grids.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A simulated value left the representable range.
class SimulationDiverged : public std::runtime_error {
 public:
  SimulationDiverged(const std::string& what, long t, long replicate)
      : std::runtime_error(what), t(t), replicate(replicate) {}
  long t;
  long replicate;
};

// Declared coefficient tail cannot be truncated at the requested tolerance.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, long required_lag)
      : std::runtime_error(what), required_lag(required_lag) {}
  long required_lag;
};

// Adaptive quadrature failed to converge or the integrand misbehaved.
class QuadratureError : public std::runtime_error {
 public:
  explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

// Two independent computation routes disagreed beyond tolerance.
class ConsistencyError : public std::logic_error {
 public:
  explicit ConsistencyError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace archmix
