#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace kan3 {

enum class ErrorKind {
  NotUnimodular,
  NotHyperbolic,
  EigenvalueTooSmall,
  WrongFixedPointCount,
  DegenerateVector,
  NoValidN0,
  InfeasibleLayout,
  IntegratorDivergence,
  WindowMismatch,
  BisectionFailure,
  SupportCollision,
  Inconclusive,
  OutsideBranches,
  InvalidInterval,
  TooFewSamples,
  OutOfWindow,
  BudgetExhausted,
  ParseError,
  RangeError,
  UnknownKey,
  IoError,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

/// Every recoverable failure in the library is reported through this type;
/// `kind()` carries the contract-level error name.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  /// Field name for RangeError/UnknownKey.
  Error(ErrorKind kind, const std::string& what, std::string subject)
      : Error(kind, what) {
    subject_ = std::move(subject);
  }
  /// Position for ParseError (1-based).
  Error(ErrorKind kind, const std::string& what, int line, int column)
      : Error(kind, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what) {
    line_ = line;
    column_ = column;
  }

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& subject() const noexcept { return subject_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  ErrorKind kind_;
  std::string subject_;
  int line_ = 0;
  int column_ = 0;
};

}  // namespace kan3
