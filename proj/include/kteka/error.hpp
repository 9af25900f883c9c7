#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kteka {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent caller input (dimension mismatch, empty set, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// File content that cannot be parsed. `line()` is 1-based, 0 when unknown.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InputError(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Experiment configuration that cannot be honoured (missing class prototype, ...).
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

/// Floating-point failure: underflow, non-finite result.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Degenerate geometry: all timestamps equal, alignment row with zero mass.
class DegenerateError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace kteka
