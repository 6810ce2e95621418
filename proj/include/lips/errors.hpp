#ifndef LIPS_ERRORS_HPP
#define LIPS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lips {

// Error taxonomy used across the toolkit.  The CLI maps ArgumentError to
// exit code 2 and every other lips exception to exit code 1.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid user-supplied argument (bad order, bad flag combination, ...).
struct ArgumentError : Error {
  using Error::Error;
};

// Input outside the mathematical domain of an operation (eps <= 0, q outside
// the range of f, ...).
struct DomainError : Error {
  using Error::Error;
};

// A requested value is outside the representable/attainable range of an
// inverse map (e.g. p not attainable by any eps in the bisection bracket).
struct RangeError : Error {
  using Error::Error;
};

// An orbit or an inner argument left the monitored section beyond the margin.
struct EscapeError : Error {
  using Error::Error;
};

// An iterative scheme failed to converge within its cap.
struct NumericalError : Error {
  using Error::Error;
};

// A degenerate configuration was detected (affine f with p = 1 produces a
// continuum of period-2 roots, identically-zero defining functions, ...).
struct DegeneracyError : Error {
  using Error::Error;
};

}  // namespace lips

#endif  // LIPS_ERRORS_HPP
