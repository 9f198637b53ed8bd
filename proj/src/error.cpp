#include "qms/error.hpp"

namespace qms {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonHermitianInput: return "NonHermitianInput";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::NotAnIsometry: return "NotAnIsometry";
    case ErrorCode::CompletionNotPSD: return "CompletionNotPSD";
    case ErrorCode::InvalidSquare: return "InvalidSquare";
    case ErrorCode::RepresentationMismatch: return "RepresentationMismatch";
    case ErrorCode::NotDoublyStochastic: return "NotDoublyStochastic";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::BoundViolated: return "BoundViolated";
    case ErrorCode::NotDefinedForSmallN: return "NotDefinedForSmallN";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::CertificationFailed: return "CertificationFailed";
    case ErrorCode::InvariantViolated: return "InvariantViolated";
    case ErrorCode::DegenerateTopLeft: return "DegenerateTopLeft";
    case ErrorCode::RelationViolated: return "RelationViolated";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace qms
