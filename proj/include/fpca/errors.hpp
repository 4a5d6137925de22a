#pragma once

#include <stdexcept>
#include <string>

namespace fpca {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A closed-form operator was evaluated outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A factorization failed to reach its accuracy target.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Input is structurally valid but degenerate for the requested operation
/// (zero spectral norm, target sparsity too large, ...).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// Precondition violation on user-supplied arguments.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Malformed matrix or configuration file.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace fpca
