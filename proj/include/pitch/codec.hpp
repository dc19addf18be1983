#pragma once

#include <json.hpp>

#include "pitch/catalog.hpp"
#include "pitch/decision.hpp"
#include "pitch/metrics.hpp"
#include "pitch/scoring.hpp"

/// JSON encodings shared by the audit log and the wire API. Decoders throw
/// SchemaError naming the offending field.
namespace pitch::codec {

using nlohmann::json;

json encode(const catalog::SentenceScript& script);
json encode(const catalog::ChallengeRequest& request);
json encode(const catalog::ChallengeSpec& spec);
json encode(const scoring::SampleRef& sample);
json encode(const metrics::DegradationResult& result);
json encode(const decision::Verdict& verdict);
json encode(const decision::CalibrationConfig& cfg);

catalog::SentenceScript decode_script(const json& j);
catalog::ChallengeRequest decode_request(const json& j);
scoring::SampleRef decode_sample(const json& j);
metrics::DegradationResult decode_degradation(const json& j);
decision::Verdict decode_verdict(const json& j);

/// Typed member access.
template <class T>
T get(const json& j, const char* name) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "expected a JSON object");
  const auto it = j.find(name);
  if (it == j.end()) throw Error(ErrorCode::SchemaError, std::string("missing field '") + name + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::SchemaError, std::string("field '") + name + "' has the wrong type");
  }
}

/// Absent or null yields `fallback`.
template <class T>
T get_or(const json& j, const char* name, T fallback) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "expected a JSON object");
  const auto it = j.find(name);
  if (it == j.end() || it->is_null()) return fallback;
  return get<T>(j, name);
}

}  // namespace pitch::codec
