#pragma once

#include <string_view>

#include "pitch/common.hpp"
#include "pitch/metrics.hpp"

namespace pitch::decision {

using metrics::Rationale;

struct CalibrationConfig {
  double tau_base = 0.25;
  double temperature = 0.7;
  double auto_threshold = 0.7;

  /// Throws InvalidArgument (InvalidTemperature for T <= 0) when out of domain.
  void validate() const;

  bool operator==(const CalibrationConfig&) const = default;
};

enum class Routing { Automated, HumanReview };
enum class Tag { None, DeepfakeLikely, DeepfakeCertainly };

std::string_view to_string(Routing routing);
std::string_view to_string(Tag tag);
Routing parse_routing(std::string_view text);
Tag parse_tag(std::string_view text);

struct Verdict {
  Label predicted = Label::Real;
  double m = 0.0;
  double confidence_raw = 0.0;
  double confidence_calibrated = 0.0;
  Routing routing = Routing::HumanReview;
  Tag tag = Tag::None;
  Rationale rationale = Rationale::None;

  bool operator==(const Verdict&) const = default;
};

/// Normalized distance from the decision boundary, |m - tau| / tau.
double raw_confidence(double m, const CalibrationConfig& cfg);

/// Temperature calibration c^(1/T).
double calibrate(double c_raw, const CalibrationConfig& cfg);

/// Label, confidence, routing and tag for one degradation score.
/// m == tau_base is a Real prediction with zero confidence.
Verdict decide(double m, Rationale dominant, const CalibrationConfig& cfg);

/// True when the calibrated confidence for m clears the automation bar.
bool is_automated(double m, const CalibrationConfig& cfg);

}  // namespace pitch::decision
