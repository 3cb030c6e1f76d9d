#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cisjac {

/// Failure while reading expression or system-definition text.
/// Positions are 1-based and point into the offending source.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, std::string message, std::string token);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }
  const std::string& token() const noexcept { return token_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
  std::string token_;
};

/// Domain failure during numeric evaluation: log/sqrt of a negative,
/// division by zero, fractional power of a negative base.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition failure on otherwise well-formed input: rank-deficient
/// Jacobian, undeclared or violated separability, chart mismatches.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric process failure: solver non-convergence, non-finite state.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cisjac
