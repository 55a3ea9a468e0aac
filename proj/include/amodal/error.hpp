#pragma once

#include <stdexcept>
#include <string>

namespace amodal {

// Base for every error raised by the library. The CLI maps InvalidInput
// subclasses to exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class InvariantViolation : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class NotFound : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class ParseError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// A pluggable segmenter or completer broke its contract during decomposition.
class ContractViolation : public Error {
 public:
  ContractViolation(int step, const std::string& what)
      : Error("step " + std::to_string(step) + ": " + what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

}  // namespace amodal
