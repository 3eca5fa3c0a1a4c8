#pragma once

#include <stdexcept>
#include <string>

namespace nestif {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A truncated-basis construction would silently drop more probability than
/// the contract allows. Carries the measured tail mass.
struct TruncationError : Error {
  double tail_mass;
  TruncationError(const std::string& msg, double tail)
      : Error(msg), tail_mass(tail) {}
};

/// Structured input validation failure; `field` names the offending key.
struct ValidationError : Error {
  std::string field;
  ValidationError(const std::string& msg, std::string field_name)
      : Error(msg), field(std::move(field_name)) {}
};

/// A required piece of configuration (geometry, material data) is missing.
struct ConfigError : Error {
  using Error::Error;
};

/// Numerical scheme failed to converge within its budget. Carries the last
/// two successive estimates so callers can judge how bad the failure is.
struct ConvergenceError : Error {
  double last_estimate;
  double previous_estimate;
  ConvergenceError(const std::string& msg, double last, double previous)
      : Error(msg), last_estimate(last), previous_estimate(previous) {}
};

/// Density-matrix integration violated a sanity bound (trace drift,
/// negativity). Carries the measured defect.
struct IntegratorError : Error {
  double defect;
  IntegratorError(const std::string& msg, double measured_defect)
      : Error(msg), defect(measured_defect) {}
};

}  // namespace nestif
