#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace liewalk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands of incompatible dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition does not hold for the given arguments.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The computation itself failed: singular input, non-contracting recursion, missing coverage.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace liewalk
