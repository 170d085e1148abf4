#pragma once

#include <stdexcept>
#include <string>

namespace vers {

// Base class for every error this library throws.
struct VersError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A parameter set violates a documented precondition (non-prime modulus,
// K > N, overlapping evaluation points, ...).
struct InvalidConfig : VersError {
  using VersError::VersError;
};

struct DivisionByZero : VersError {
  using VersError::VersError;
};

// Interpolation or Vandermonde construction received repeated x-values.
struct DuplicatePoint : VersError {
  using VersError::VersError;
};

// An adversarial behavior matrix is malformed (wrong shape or version index
// out of range for some owner).
struct InvalidBehavior : VersError {
  using VersError::VersError;
};

// An exhaustive enumeration was requested above the supported size cap.
struct TooLargeToEnumerate : VersError {
  using VersError::VersError;
};

// A state the protocol guarantees impossible was reached (e.g. reports that
// agree on their tag but lie on no common polynomial).
struct InternalInconsistency : VersError {
  using VersError::VersError;
};

}  // namespace vers
