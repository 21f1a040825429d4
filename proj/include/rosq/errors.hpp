#pragma once

#include <stdexcept>
#include <string>

namespace rosq {

/// Invalid model or experiment parameters (bad distribution parameters,
/// malformed config file, unknown keys).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Queue model with load rho >= 1.
class StabilityError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A numerical routine failed to reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double partial_estimate)
      : std::runtime_error(what), partial_estimate_(partial_estimate) {}

  double partial_estimate() const noexcept { return partial_estimate_; }

 private:
  double partial_estimate_;
};

}  // namespace rosq
