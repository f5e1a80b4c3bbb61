#pragma once

#include <stdexcept>
#include <string>

namespace emkit {

// Validation errors: bad input files, bad configs, malformed models.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical errors: the computation is well posed for other inputs but
// cannot proceed here (gap closures, degeneracies, non-convergence).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : ValidationError {
  using ValidationError::ValidationError;
};
struct GridMismatchError : ValidationError {
  using ValidationError::ValidationError;
};
struct GeometryMismatchError : ValidationError {
  using ValidationError::ValidationError;
};
struct NormalizationError : ValidationError {
  using ValidationError::ValidationError;
};
struct DomainError : ValidationError {
  using ValidationError::ValidationError;
};
struct SizeError : ValidationError {
  using ValidationError::ValidationError;
};
struct MissingBandError : ValidationError {
  using ValidationError::ValidationError;
};

struct GapClosureError : NumericalError {
  using NumericalError::NumericalError;
};
struct MetallicOccupationError : NumericalError {
  using NumericalError::NumericalError;
};
struct BranchJumpError : NumericalError {
  using NumericalError::NumericalError;
};
struct DegeneracyError : NumericalError {
  using NumericalError::NumericalError;
};
struct DegenerateTransitionError : NumericalError {
  using NumericalError::NumericalError;
};
struct SingularSystemError : NumericalError {
  using NumericalError::NumericalError;
};
struct NonConvergenceError : NumericalError {
  using NumericalError::NumericalError;
};
struct GaplessClusterError : NumericalError {
  using NumericalError::NumericalError;
};
struct NoPeakError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace emkit
