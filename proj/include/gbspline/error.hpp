#pragma once

#include <stdexcept>
#include <string>

namespace gbs {

enum class ErrorCode {
  NotNondecreasing,
  NotOpen,
  TooShort,
  InvalidFamily,
  OutOfInterval,
  UnsupportedOrder,
  IntervalStraddle,
  TargetsOutsideSource,
  TargetTooSmall,
  DegreeTooSmall,
  OutOfActiveRegion,
  LengthMismatch,
  TooFewRows,
  AllMissingDiagonal,
  InconsistentCoefficient,
  SingularGeneratorSystem,
  TaylorMismatch,
  SingularLocalSystem,
  InvalidPlan,
  KnotOutsideActiveRegion,
  MultiplicityOverflow,
  FamilyNotClosedUnderDerivative,
  DepthExceeded,
};

inline const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotNondecreasing: return "NotNondecreasing";
    case ErrorCode::NotOpen: return "NotOpen";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::InvalidFamily: return "InvalidFamily";
    case ErrorCode::OutOfInterval: return "OutOfInterval";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::IntervalStraddle: return "IntervalStraddle";
    case ErrorCode::TargetsOutsideSource: return "TargetsOutsideSource";
    case ErrorCode::TargetTooSmall: return "TargetTooSmall";
    case ErrorCode::DegreeTooSmall: return "DegreeTooSmall";
    case ErrorCode::OutOfActiveRegion: return "OutOfActiveRegion";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::AllMissingDiagonal: return "AllMissingDiagonal";
    case ErrorCode::InconsistentCoefficient: return "InconsistentCoefficient";
    case ErrorCode::SingularGeneratorSystem: return "SingularGeneratorSystem";
    case ErrorCode::TaylorMismatch: return "TaylorMismatch";
    case ErrorCode::SingularLocalSystem: return "SingularLocalSystem";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::KnotOutsideActiveRegion: return "KnotOutsideActiveRegion";
    case ErrorCode::MultiplicityOverflow: return "MultiplicityOverflow";
    case ErrorCode::FamilyNotClosedUnderDerivative: return "FamilyNotClosedUnderDerivative";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
  }
  return "Unknown";
}

/// Domain error raised by every gbspline routine. `code()` identifies the
/// failure class; `what()` carries a human-readable detail message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  const char* name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

/// Default length below which an interval is treated as empty.
inline constexpr double kDefaultTol = 1e-10;
/// Default agreement tolerance for aggregated coefficients.
inline constexpr double kDefaultCoefTol = 1e-6;

}  // namespace gbs
