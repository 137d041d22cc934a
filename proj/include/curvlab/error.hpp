#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curvlab {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violated a documented contract (bad index, non-orthogonal frame, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A mathematical precondition of an analysis step does not hold for the input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `position()` is a 0-based character offset into the source.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)), message_(message), position_(position) {}

  std::size_t position() const noexcept { return position_; }
  /// The message without the position suffix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
  std::size_t position_;
};

}  // namespace curvlab
