#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pulse {

/// Base of all errors raised by the library. The CLI maps subclasses to
/// exit codes: ValidationError/ParseError/MigrationError -> 2, IoError -> 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable files, short writes, missing paths.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Inputs that parse but violate a documented contract (duplicate ids,
/// out-of-range parameters, empty vocabularies).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error(message + " (line " + std::to_string(line) + ")"), line_(line) {}
  explicit ParseError(const std::string& message) : Error(message), line_(0) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A persisted artifact written by a newer (or otherwise incompatible)
/// tool version.
class MigrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace pulse
