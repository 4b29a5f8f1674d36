#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace miranda {

// Expression text could not be parsed; `position` is a byte offset into the source.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Evaluation produced a non-finite intermediate or output (division by zero, overflow).
class EvalError : public std::runtime_error {
 public:
  explicit EvalError(const std::string& message) : std::runtime_error(message) {}
};

enum class SolveFailure {
  MirandaFailed,      // boundary condition falsified by sampling
  MarginFloor,        // a face margin collapsed to the numeric floor
  RetryCapExhausted,  // no regular value found within the attempt budget
  ParityViolation,    // zero count contradicts the parity invariant
  TraceFailure,       // continuation could not complete a component
  Unsupported,        // dimension or map class outside the operation's domain
};

class SolveError : public std::runtime_error {
 public:
  SolveError(SolveFailure kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  SolveFailure kind() const { return kind_; }

 private:
  SolveFailure kind_;
};

}  // namespace miranda
