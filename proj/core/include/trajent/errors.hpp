#pragma once

#include <stdexcept>
#include <string>

namespace trajent {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid argument outside the model's domain (bad rates, |beta| != 1, ...).
struct DomainError : Error {
  using Error::Error;
};

/// State or operator no longer representable on the truncated Fock space.
struct TruncationError : Error {
  using Error::Error;
};

/// Linear-algebra result violates a required property (negative eigenvalue, ...).
struct NumericalError : Error {
  using Error::Error;
};

/// The Liouvillian kernel is not one-dimensional.
struct DegenerateSteadyStateError : Error {
  using Error::Error;
};

/// Integration step too large for the requested trajectory.
struct StepSizeError : Error {
  using Error::Error;
};

/// Too few decorrelated blocks for a meaningful error bar.
struct InsufficientDataError : Error {
  using Error::Error;
};

}  // namespace trajent
