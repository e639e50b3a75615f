#pragma once

#include <stdexcept>
#include <string>

namespace dte {

// Base for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid caller input: dimension mismatches, bad flags, malformed data.
struct InputError : Error {
  using Error::Error;
};

// All points identical (or otherwise sigma^2 = 0) in bandwidth selection.
struct DegenerateBandwidthError : InputError {
  using InputError::InputError;
};

// Model fitting failed: empty arm, non-convergence.
struct FitError : Error {
  using Error::Error;
};

// Linear algebra failure that survived jitter escalation.
struct NumericalError : Error {
  using Error::Error;
};

// Cross statistic has zero variance; the studentized statistic is undefined.
struct DegenerateStatisticError : Error {
  using Error::Error;
};

// Run configuration cannot be executed as given (e.g. a fold lost an arm).
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace dte
