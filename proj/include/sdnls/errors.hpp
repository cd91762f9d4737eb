#pragma once

#include <stdexcept>
#include <string>

namespace sdnls {

/// Invalid grid, parameter, or scenario settings.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A function was called outside its domain (p < 1, zero field in a ratio, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Array shapes that should have matched did not.
class SizeMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The scalar substep integrator gave up.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// NaN or Inf appeared in the state during a run.
class NumericalBlowup : public std::runtime_error {
 public:
  NumericalBlowup(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sdnls
