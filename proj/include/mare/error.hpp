#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mare {

enum class ErrorCode {
  SingularMatrix,
  NoConvergence,
  ShapeMismatch,
  NonFinite,
  NotSingular,
  AmbiguousKernel,
  NotZMatrix,
  InvalidParameters,
  NonpositiveDiagonal,
  IterationBreakdown,
  MaxIterations,
  InsufficientTrace,
  GenerationFailed,
  InvalidInput,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotSingular: return "NotSingular";
    case ErrorCode::AmbiguousKernel: return "AmbiguousKernel";
    case ErrorCode::NotZMatrix: return "NotZMatrix";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::NonpositiveDiagonal: return "NonpositiveDiagonal";
    case ErrorCode::IterationBreakdown: return "IterationBreakdown";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::InsufficientTrace: return "InsufficientTrace";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

}  // namespace mare
