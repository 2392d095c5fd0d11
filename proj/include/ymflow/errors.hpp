#pragma once

#include <stdexcept>
#include <string>

namespace ymflow {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a formula (t >= T, rho <= 0 for singular forms, ...).
struct DomainError : Error {
  using Error::Error;
};

/// Query too close to an eigenvalue; the fundamental pair is degenerate.
struct SingularityError : Error {
  using Error::Error;
};

/// A self-check residual exceeded its threshold.
struct AccuracyError : Error {
  using Error::Error;
};

/// Time stepping produced a non-finite state.
struct BlowupError : Error {
  using Error::Error;
};

/// Fit-quality failure (too little data, non-monotone tail).
struct FitError : Error {
  using Error::Error;
};

struct UsageError : Error {
  using Error::Error;
};

}  // namespace ymflow
