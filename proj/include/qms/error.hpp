#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qms {

// Every failure raised by the library carries one of these codes so callers
// (and the CLI) can branch on the kind without parsing messages.
enum class ErrorCode {
  NonHermitianInput,
  NonFiniteInput,
  ShapeMismatch,
  SizeMismatch,
  NotAnIsometry,
  CompletionNotPSD,
  InvalidSquare,
  RepresentationMismatch,
  NotDoublyStochastic,
  DimensionMismatch,
  TooLarge,
  BoundViolated,
  NotDefinedForSmallN,
  NotFound,
  Inconclusive,
  CertificationFailed,
  InvariantViolated,
  DegenerateTopLeft,
  RelationViolated,
  ParseError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qms
