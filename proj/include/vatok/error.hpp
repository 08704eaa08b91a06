#pragma once

#include <stdexcept>
#include <string>

namespace vatok {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or data invariant was violated by the caller.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure: open, read, or write.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A file was readable but its contents do not conform to the expected format.
class FormatError : public Error {
 public:
  using Error::Error;
};

class BadMagicError : public FormatError {
 public:
  using FormatError::FormatError;
};

class UnsupportedVersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

class TruncatedError : public FormatError {
 public:
  using FormatError::FormatError;
};

class NonFiniteError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Training produced a non-finite loss. what() carries a dump of the model state.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) {
    throw ValidationError(message);
  }
}

}  // namespace detail
}  // namespace vatok
