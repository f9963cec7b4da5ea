#include "daseinkit/error.hpp"

namespace daseinkit {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::DegenerateIntersection: return "DegenerateIntersection";
    case ErrorKind::SizeLimitExceeded: return "SizeLimitExceeded";
    case ErrorKind::NotProjection: return "NotProjection";
    case ErrorKind::RestrictionAmbiguous: return "RestrictionAmbiguous";
    case ErrorKind::PresheafMismatch: return "PresheafMismatch";
    case ErrorKind::NotUnitVector: return "NotUnitVector";
    case ErrorKind::UnboundSymbol: return "UnboundSymbol";
    case ErrorKind::MissingSymbol: return "MissingSymbol";
    case ErrorKind::InvalidStageMap: return "InvalidStageMap";
    case ErrorKind::NotComposable: return "NotComposable";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

}  // namespace daseinkit
