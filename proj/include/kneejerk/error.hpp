#pragma once

#include <stdexcept>
#include <string>

namespace kj {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a type invariant (bad constant, empty sum, bad index, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the domain an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation produced a non-number; the message names the node.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or schema violation.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace kj
