#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hyperembed {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: malformed files, bad flags, infeasible requests.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A malformed line in a text input. The message carries the line number.
class ParseError : public InputError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : InputError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Non-finite values or arguments outside a kernel's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The distance gradient is undefined at coincident points.
class SingularGradientError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Training or evaluation produced a non-finite quantity.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hyperembed
