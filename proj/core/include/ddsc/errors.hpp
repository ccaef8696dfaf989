#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ddsc {

enum class ErrorCode {
  ShapeMismatch,
  NegativeEntry,
  ConstraintViolation,
  AggregateInconsistent,
  NonFiniteInput,
  DimensionMismatch,
  WindowLengthMismatch,
  LengthMismatch,
  ZeroTruthTotal,
  ZeroTruthEnergy,
  UnitUndeclared,
  EmptyInput,
  InsufficientHouses,
  NoCompleteWeeks,
  InvalidSpec,
  DimensionTooLarge,
  InvalidConfig,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code. Every library failure is
/// reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ddsc
