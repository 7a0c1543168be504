#pragma once

#include <stdexcept>
#include <string>

namespace dlab {

struct InsufficientLevels : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two distinct candidates could not be ordered at the maximal refinement.
struct CertificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NoPairWithinBound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dlab
