#ifndef BECKIT_ERRORS_HPP
#define BECKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace beckit {

// Base for everything this library throws, so callers can catch one type.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument outside the mathematical domain of the operation.
struct DomainError : Error {
  using Error::Error;
};

// The requested value is a divergent series / infinite limit.
struct DivergentSeries : Error {
  using Error::Error;
};

// An iterative solver failed to reach its tolerance.
struct ConvergenceFailure : Error {
  using Error::Error;
};

// Adaptive quadrature could not reach the requested tolerance.
struct QuadratureFailure : Error {
  using Error::Error;
};

// A potential failed (or lacked) positive-type certification.
struct NotPositiveType : Error {
  using Error::Error;
};

// A stated theorem hypothesis does not hold for the given parameters.
struct PreconditionFailed : Error {
  using Error::Error;
};

// A search completed without any qualifying point.
struct NotFound : Error {
  using Error::Error;
};

// A search window contained no evaluable point.
struct EmptySearch : Error {
  using Error::Error;
};

// Mode enumeration would exceed the configured capacity.
struct CapacityExceeded : Error {
  using Error::Error;
};

// Truncated sum carries more weight at the boundary than allowed.
struct TruncationError : Error {
  using Error::Error;
};

// A quantity overflowed even in log-domain arithmetic.
struct OverflowGuard : Error {
  using Error::Error;
};

}  // namespace beckit

#endif
