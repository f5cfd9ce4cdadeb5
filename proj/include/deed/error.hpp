#pragma once

#include <stdexcept>
#include <string>

namespace deed {

/// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A domain invariant does not hold (bad pd ordering, NaN in hs, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied argument violates an operation's precondition.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Train and test sets share facts.
class ContaminationError : public Error {
 public:
  using Error::Error;
};

/// An operation produced nothing to work with (e.g. no same-object pairs).
class EmptyResultError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Bad magic, unknown version, malformed header or model document.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Payload length disagrees with what the header declares.
class CorruptionError : public FormatError {
 public:
  using FormatError::FormatError;
};

}  // namespace deed
