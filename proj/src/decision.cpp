#include "pitch/decision.hpp"

#include <cmath>

namespace pitch::decision {

void CalibrationConfig::validate() const {
  if (!(tau_base > 0.0 && tau_base < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "tau_base must lie in (0, 1)");
  }
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorCode::InvalidTemperature, "temperature must be positive");
  }
  if (!(auto_threshold > 0.0 && auto_threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "auto_threshold must lie in (0, 1]");
  }
}

std::string_view to_string(Routing routing) {
  return routing == Routing::Automated ? "Automated" : "HumanReview";
}

std::string_view to_string(Tag tag) {
  switch (tag) {
    case Tag::None: return "None";
    case Tag::DeepfakeLikely: return "Deepfake-Likely";
    case Tag::DeepfakeCertainly: return "Deepfake-Certainly";
  }
  return "None";
}

Routing parse_routing(std::string_view text) {
  if (text == "Automated") return Routing::Automated;
  if (text == "HumanReview") return Routing::HumanReview;
  throw Error(ErrorCode::SchemaError, "unknown routing '" + std::string(text) + "'");
}

Tag parse_tag(std::string_view text) {
  if (text == "None") return Tag::None;
  if (text == "Deepfake-Likely") return Tag::DeepfakeLikely;
  if (text == "Deepfake-Certainly") return Tag::DeepfakeCertainly;
  throw Error(ErrorCode::SchemaError, "unknown tag '" + std::string(text) + "'");
}

double raw_confidence(double m, const CalibrationConfig& cfg) {
  return std::abs(m - cfg.tau_base) / cfg.tau_base;
}

double calibrate(double c_raw, const CalibrationConfig& cfg) {
  return std::pow(c_raw, 1.0 / cfg.temperature);
}

bool is_automated(double m, const CalibrationConfig& cfg) {
  return calibrate(raw_confidence(m, cfg), cfg) > cfg.auto_threshold;
}

Verdict decide(double m, Rationale dominant, const CalibrationConfig& cfg) {
  if (!(m >= 0.0 && m <= 1.0)) throw Error(ErrorCode::InvalidArgument, "m must lie in [0, 1]");
  Verdict v;
  v.m = m;
  v.predicted = m > cfg.tau_base ? Label::Fake : Label::Real;
  v.confidence_raw = raw_confidence(m, cfg);
  v.confidence_calibrated = calibrate(v.confidence_raw, cfg);
  v.routing = v.confidence_calibrated > cfg.auto_threshold ? Routing::Automated : Routing::HumanReview;
  if (v.predicted == Label::Fake) {
    v.tag = v.routing == Routing::Automated ? Tag::DeepfakeCertainly : Tag::DeepfakeLikely;
    v.rationale = dominant;
  }
  return v;
}

}  // namespace pitch::decision
