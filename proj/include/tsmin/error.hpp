#pragma once

#include <stdexcept>
#include <string>

namespace tsmin {

/// Broad error categories. The CLI maps these onto exit codes and the
/// `kind` field of the machine-readable error record.
enum class ErrorKind {
  Parse,       // malformed document or file
  Structural,  // well-formed document describing an invalid tree
  Frontend,    // lexically broken or unparseable test source
  Io,
  Data,        // inconsistent inputs (fault maps, missing artifacts, ...)
  Stale,       // cached artifact does not match the current roster
  Config,
  Undefined,   // mathematically undefined request (fitness of n < 2, ...)
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Frontend failure with a source position (1-based line and column).
class FrontendError : public Error {
 public:
  FrontendError(const std::string& message, int line, int column)
      : Error(ErrorKind::Frontend, message + " at " + std::to_string(line) +
                                       ":" + std::to_string(column)),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace tsmin
