#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace daseinkit {

enum class ErrorKind {
  NotHermitian,
  NumericalFailure,
  InvalidParameter,
  DimMismatch,
  DegenerateIntersection,
  SizeLimitExceeded,
  NotProjection,
  RestrictionAmbiguous,
  PresheafMismatch,
  NotUnitVector,
  UnboundSymbol,
  MissingSymbol,
  InvalidStageMap,
  NotComposable,
  ParseError,
  SchemaError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries one of the kinds above so
// callers (and the CLI exit-code logic) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace daseinkit
