#pragma once

#include <stdexcept>
#include <string>

namespace trapwalk {

// Invalid scalar input (density outside [0,1), nonpositive tolerance, ...).
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Operation requested in an unsupported dimension.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Geometric precondition violated (site outside box, box too small, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Instance exceeds a hard size cap.
struct SizeError : std::length_error {
  using std::length_error::length_error;
};

// Spectrum of an empty site set requested.
struct EmptySpectrumError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Iterative solve failed to reach tolerance; carries the last residual.
struct ConvergenceError : std::runtime_error {
  double residual;
  ConvergenceError(const std::string& msg, double res)
      : std::runtime_error(msg), residual(res) {}
};

// A series or measure integral with nonconvergent tails.
struct DivergenceError : std::domain_error {
  using std::domain_error::domain_error;
};

// Time horizon too small for the requested scaling bracket.
struct TimeTooSmallError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace trapwalk
