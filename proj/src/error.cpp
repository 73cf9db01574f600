#include "tsdapt/error.hpp"

namespace tsdapt {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::MissingTargetClass: return "MissingTargetClass";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::InvalidLength: return "InvalidLength";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InputError: return "InputError";
    case ErrorCode::OutputError: return "OutputError";
  }
  return "Unknown";
}

}  // namespace tsdapt
