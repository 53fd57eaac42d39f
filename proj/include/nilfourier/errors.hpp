#pragma once

#include <stdexcept>
#include <string>

namespace nilfourier {

/// Bad user input: malformed files, dimension mismatches, violated preconditions.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An internal consistency check failed (a constructed object violates its own
/// invariants, a back-substitution did not converge, ...).
struct InternalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem / serialization failures.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nilfourier
