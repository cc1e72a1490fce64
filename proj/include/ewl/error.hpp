#pragma once

#include <stdexcept>
#include <string>

namespace ewl {

/// Violated precondition or malformed input (length mismatch, bad radius, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested operation is not defined for the given object,
/// e.g. an energy query on a nonlinearity without a potential.
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A numerical procedure failed to deliver: non-contraction, blow-up in an
/// authoritative region, unattainable target.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ewl
