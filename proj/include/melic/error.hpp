#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace melic {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries a 1-based line/column position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        message_(what),
        line_(line),
        column_(column) {}

  /// The message without the position suffix.
  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Construct the grammar recognises but the library deliberately rejects.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Out-of-range argument to an analysis operation.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Input whose shape makes the requested quantity undefined.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Rows of a table that do not share a column set.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace melic
