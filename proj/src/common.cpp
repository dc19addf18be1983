#include "pitch/common.hpp"

namespace pitch {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidReference: return "InvalidReference";
    case ErrorCode::InsufficientClasses: return "InsufficientClasses";
    case ErrorCode::InvalidPanel: return "InvalidPanel";
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::InvalidTemperature: return "InvalidTemperature";
    case ErrorCode::InsufficientEligible: return "InsufficientEligible";
    case ErrorCode::ExhaustedChallenges: return "ExhaustedChallenges";
    case ErrorCode::SampleNotFound: return "SampleNotFound";
    case ErrorCode::AdapterUnavailable: return "AdapterUnavailable";
    case ErrorCode::InvalidTransition: return "InvalidTransition";
    case ErrorCode::InvalidReview: return "InvalidReview";
    case ErrorCode::SessionNotFound: return "SessionNotFound";
    case ErrorCode::StorageError: return "StorageError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::VerdictSealed: return "VerdictSealed";
  }
  return "Unknown";
}

std::string_view to_string(Label label) {
  return label == Label::Real ? "Real" : "Fake";
}

std::string_view to_string(Platform platform) {
  return platform == Platform::Desktop ? "Desktop" : "Mobile";
}

Label parse_label(std::string_view text) {
  if (text == "Real") return Label::Real;
  if (text == "Fake") return Label::Fake;
  throw Error(ErrorCode::SchemaError, "unknown label '" + std::string(text) + "'");
}

Platform parse_platform(std::string_view text) {
  if (text == "Desktop") return Platform::Desktop;
  if (text == "Mobile") return Platform::Mobile;
  throw Error(ErrorCode::SchemaError, "unknown platform '" + std::string(text) + "'");
}

}  // namespace pitch
