#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vecmerge {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. The message ends with ", line N" (1-based).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + ", line " + std::to_string(line)), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Inputs that are well formed but violate a contract: shape or label
/// mismatches, out-of-range parameters, unwritable paths.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numeric procedure cannot produce a result (singular system, map that
/// is not orthogonal where one is required).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace vecmerge
