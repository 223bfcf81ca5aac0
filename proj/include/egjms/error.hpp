#pragma once

#include <stdexcept>
#include <string>

namespace egjms {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A derivative was requested beyond the truncation order a jet carries.
class OrderError : public Error {
 public:
  using Error::Error;
};

/// Division by zero, log/sqrt outside the domain, a non-finite coefficient,
/// a singular metric or a degenerate embedding.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent dimensions, unknown identifiers, malformed geometry files.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// The requested (k, n, level) combination has no operator.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

class ParseError : public SpecError {
 public:
  ParseError(const std::string& message, int line, int column)
      : SpecError(message + " at line " + std::to_string(line) + ", column " +
                  std::to_string(column)),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace egjms
