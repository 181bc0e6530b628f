#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pedmap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input text (CSV, JSON) could not be parsed. Carries the 1-based line
/// number when one is meaningful, 0 otherwise.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace pedmap
