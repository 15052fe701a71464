#pragma once

#include <stdexcept>
#include <string>

namespace ignr {

/// Caller passed a value outside an operation's domain (bad size, range,
/// mismatched dimensions, degenerate histogram).
class InputDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine produced NaN/Inf or failed to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed dataset, config, or checkpoint file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ignr
