#pragma once

#include <stdexcept>
#include <string>

namespace thetagreen {

/// Broad failure classes. The CLI maps these onto exit codes.
enum class ErrorKind {
  InvalidInput,     // malformed or out-of-contract arguments
  Domain,           // mathematically outside the domain (off divisor, Y not positive, ...)
  Precision,        // requested tolerance beyond double precision
  IllConditioned,   // near-singular linear algebra
  Singular,         // singular point of a map (vanishing gradient, branch point in a chart)
  NonConvergence,   // quadrature / extrapolation failed to settle
  Unsupported,      // valid input the library does not handle (e.g. genus)
  Inconsistent,     // two routes to the same quantity disagree
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by eta() when the point is not on the theta divisor; carries the residual.
class OffDivisorError : public Error {
 public:
  OffDivisorError(const std::string& what, double residual)
      : Error(ErrorKind::Domain, what), residual_(residual) {}

  double theta_residual() const noexcept { return residual_; }

 private:
  double residual_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace thetagreen
