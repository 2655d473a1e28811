#pragma once

#include <stdexcept>
#include <string>

namespace qfdiv {

/// Input outside the mathematical domain of an operation (negative
/// eigenvalues, singular operators where invertibility is required, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed arguments: dimension mismatches, unknown labels, parameters out
/// of range.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unparseable text or file input.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qfdiv
