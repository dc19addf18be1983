#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pitch {

/// Microseconds since the Unix epoch.
using Timestamp = std::int64_t;

enum class Label { Real, Fake };
enum class Platform { Desktop, Mobile };

/// Failure categories shared by every module. The CLI and the wire API
/// report these names verbatim.
enum class ErrorCode {
  InvalidArgument,
  InvalidReference,
  InsufficientClasses,
  InvalidPanel,
  InvalidMatrix,
  InvalidTemperature,
  InsufficientEligible,
  ExhaustedChallenges,
  SampleNotFound,
  AdapterUnavailable,
  InvalidTransition,
  InvalidReview,
  SessionNotFound,
  StorageError,
  SchemaError,
  ConfigError,
  EmptyInput,
  VerdictSealed,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

std::string_view to_string(Label label);
std::string_view to_string(Platform platform);

Label parse_label(std::string_view text);
Platform parse_platform(std::string_view text);

inline Label flip(Label label) {
  return label == Label::Real ? Label::Fake : Label::Real;
}

}  // namespace pitch
