#pragma once

#include <stdexcept>
#include <string>

namespace cotrans {

// Base for every error raised by the library. Scenario runners catch this
// type, attach context (time stamp, phase) and decide whether to abort.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Euler-rate map is singular (pitch at +-pi/2) or the attitude left the
// guard band required by a controller.
class SingularConfigurationError : public Error {
 public:
  using Error::Error;
};

// Decoupling matrix of an input-output linearization cannot be inverted
// (thrust state near zero, tilt near the Euler singularity).
class SingularLinearizationError : public Error {
 public:
  using Error::Error;
};

// Right pseudoinverse requested for a rank-deficient matrix.
class DegenerateAllocationError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double t) : Error(what), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cotrans
