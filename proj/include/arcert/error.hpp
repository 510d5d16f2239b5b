#pragma once

#include <stdexcept>
#include <string>

namespace arcert {

enum class ErrorCode {
  EmptyIntersection,
  UncoveredRegion,
  NoEnclosure,
  PreconditionViolated,
  NoAttractor,
  DecompositionInconsistent,
  AnchorFailure,
  EmptyInput,
  ParseError,
  ValidationError,
  InvalidArgument,
  Io,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// C layer can map it onto a status value without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failures remember where in the input they happened (1-based).
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what)
      : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " +
                                         std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace arcert
