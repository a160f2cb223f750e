#pragma once

#include <stdexcept>
#include <string>

namespace bro {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed caller input (empty sample vectors, empty point sets, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// An observation is outside the support of its family.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A matrix or parameter is at a point where the requested quantity is singular.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// A posterior moment does not exist for the current hyperparameters.
class MomentUndefinedError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration; the message carries the field and line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace bro
