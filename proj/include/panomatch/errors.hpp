#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace panomatch {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

/// Raised when an input violates a documented precondition.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message) : Error(message) {}
};

/// Raised when a matrix cannot be factored or solved.
/// `pivot_index` is the offending pivot when known, -1 otherwise.
class SingularityError : public Error {
 public:
  explicit SingularityError(const std::string& message, std::ptrdiff_t pivot = -1)
      : Error(message), pivot_index(pivot) {}

  std::ptrdiff_t pivot_index;
};

/// Raised when a file does not conform to its declared format.
/// `byte_offset` locates the first offending byte.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& message, std::size_t offset = 0)
      : Error(message + " (at byte " + std::to_string(offset) + ")"), byte_offset(offset) {}

  std::size_t byte_offset;
};

}  // namespace panomatch
