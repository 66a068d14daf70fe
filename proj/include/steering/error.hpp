#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace steering {

/// Caller supplied a value outside an operation's domain (bad μ, non-unit
/// vector, unsupported settings count, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested combination has no implementation (e.g. Rényi criterion with
/// three settings, closed form for explicit vectors).
class Unsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed input data. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed data that cannot serve the requested evaluation.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace steering
