#pragma once

#include <stdexcept>
#include <string>

namespace heine {

// Bad input: malformed text, violated preconditions, infeasible parameters.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A certificate that must hold by construction failed. Indicates a bug or a
// broken hypothesis that slipped through validation.
class InconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace heine
