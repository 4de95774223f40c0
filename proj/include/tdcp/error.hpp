#pragma once

#include <stdexcept>
#include <string>

namespace tdcp {

/// Bad input: malformed files, invalid models, limits exceeded.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller bug: a documented precondition was violated.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace tdcp
