#pragma once

#include <stdexcept>
#include <string>

namespace symdyn {

/// Malformed input: non-square or non-binary matrices, unknown symbols,
/// incomplete potential tables.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A mathematical precondition does not hold (reducible subsystem,
/// unnormalized potential, Delta equal to the whole alphabet, ...).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iteration did not reach its tolerance within the step budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace symdyn
