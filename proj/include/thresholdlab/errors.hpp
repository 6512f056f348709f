#pragma once

#include <stdexcept>
#include <string>

namespace thresholdlab {

/// Raised for malformed or out-of-domain input (bad sizes, probabilities
/// outside [0,1], non up-closed sets, parse errors, ...).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Raised by expression parsing; carries the byte offset of the failure.
class ParseError : public InputError {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : InputError(msg + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Raised when bisection fails to shrink its bracket within the
/// iteration cap. The final bracket is kept for reporting.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& msg, double lo, double hi)
      : std::runtime_error(msg), lo_(lo), hi_(hi) {}

  double bracket_lo() const noexcept { return lo_; }
  double bracket_hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

}  // namespace thresholdlab
