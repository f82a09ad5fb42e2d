#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ramified_zero {

enum class ErrorKind {
  NotEisenstein,
  PrecisionTooSmall,
  PrecisionTooLarge,
  FieldMismatch,
  ZeroElement,
  PrecisionExceeded,
  PrecisionExhausted,
  ZeroCoefficient,
  OddDegree,
  NoValidRotation,
  LengthMismatch,
  LevelMismatch,
  OverlappingSupport,
  BadSteering,
  UnsupportedDegree,
  StrategyFailed,
  HenselPreconditionFailed,
  SearchSpaceTooLarge,
  PreconditionViolated,
  BadInput,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotEisenstein: return "NotEisenstein";
    case ErrorKind::PrecisionTooSmall: return "PrecisionTooSmall";
    case ErrorKind::PrecisionTooLarge: return "PrecisionTooLarge";
    case ErrorKind::FieldMismatch: return "FieldMismatch";
    case ErrorKind::ZeroElement: return "ZeroElement";
    case ErrorKind::PrecisionExceeded: return "PrecisionExceeded";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::ZeroCoefficient: return "ZeroCoefficient";
    case ErrorKind::OddDegree: return "OddDegree";
    case ErrorKind::NoValidRotation: return "NoValidRotation";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::LevelMismatch: return "LevelMismatch";
    case ErrorKind::OverlappingSupport: return "OverlappingSupport";
    case ErrorKind::BadSteering: return "BadSteering";
    case ErrorKind::UnsupportedDegree: return "UnsupportedDegree";
    case ErrorKind::StrategyFailed: return "StrategyFailed";
    case ErrorKind::HenselPreconditionFailed: return "HenselPreconditionFailed";
    case ErrorKind::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::BadInput: return "BadInput";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ramified_zero
