#include "pitch/codec.hpp"

namespace pitch::codec {

namespace {

template <class F>
auto parse_enum(const json& j, const char* name, F parse) {
  const auto text = get<std::string>(j, name);
  try {
    return parse(text);
  } catch (const Error&) {
    throw Error(ErrorCode::SchemaError, std::string("field '") + name + "' has unknown value '" + text + "'");
  }
}

}  // namespace

json encode(const catalog::SentenceScript& script) {
  json j = {{"pool", catalog::to_string(script.pool)}, {"index", script.index}, {"text", script.text}};
  if (!script.language.empty()) j["language"] = script.language;
  return j;
}

json encode(const catalog::ChallengeRequest& request) {
  return {{"challenge_id", request.challenge_id},
          {"script", request.script ? encode(*request.script) : json(nullptr)},
          {"issued_at", request.issued_at},
          {"nonce", request.nonce}};
}

json encode(const catalog::ChallengeSpec& spec) {
  return {{"id", spec.id},
          {"name", spec.name},
          {"category", catalog::to_string(spec.category)},
          {"qualified", spec.qualified},
          {"desktop_only", spec.desktop_only},
          {"sentence_pool", catalog::to_string(spec.sentence_pool)},
          {"usability_rank", spec.usability_rank},
          {"instruction", spec.instruction}};
}

json encode(const scoring::SampleRef& sample) {
  return {{"sample_id", sample.sample_id},
          {"audio_uri", sample.audio_uri ? json(*sample.audio_uri) : json(nullptr)},
          {"challenge_id", sample.challenge_id},
          {"reference_text", sample.reference_text}};
}

json encode(const metrics::DegradationResult& result) {
  return {{"m", result.m},
          {"term_compliance", result.term_compliance},
          {"term_wil", result.term_wil},
          {"term_realism", result.term_realism},
          {"dominant", metrics::to_string(result.dominant)}};
}

json encode(const decision::Verdict& verdict) {
  return {{"predicted", to_string(verdict.predicted)},
          {"m", verdict.m},
          {"confidence_raw", verdict.confidence_raw},
          {"confidence_calibrated", verdict.confidence_calibrated},
          {"routing", decision::to_string(verdict.routing)},
          {"tag", decision::to_string(verdict.tag)},
          {"rationale", metrics::to_string(verdict.rationale)}};
}

json encode(const decision::CalibrationConfig& cfg) {
  return {{"tau_base", cfg.tau_base}, {"temperature", cfg.temperature}, {"auto_threshold", cfg.auto_threshold}};
}

catalog::SentenceScript decode_script(const json& j) {
  catalog::SentenceScript s;
  s.pool = parse_enum(j, "pool", catalog::parse_pool);
  s.index = get<int>(j, "index");
  s.text = get<std::string>(j, "text");
  s.language = get_or<std::string>(j, "language", "");
  return s;
}

catalog::ChallengeRequest decode_request(const json& j) {
  catalog::ChallengeRequest r;
  r.challenge_id = get<int>(j, "challenge_id");
  if (j.contains("script") && !j.at("script").is_null()) r.script = decode_script(j.at("script"));
  r.issued_at = get<Timestamp>(j, "issued_at");
  r.nonce = get<std::string>(j, "nonce");
  return r;
}

scoring::SampleRef decode_sample(const json& j) {
  scoring::SampleRef s;
  s.sample_id = get<std::string>(j, "sample_id");
  if (j.contains("audio_uri") && !j.at("audio_uri").is_null()) s.audio_uri = get<std::string>(j, "audio_uri");
  s.challenge_id = get<int>(j, "challenge_id");
  s.reference_text = get<std::string>(j, "reference_text");
  return s;
}

metrics::DegradationResult decode_degradation(const json& j) {
  metrics::DegradationResult d;
  d.m = get<double>(j, "m");
  d.term_compliance = get<double>(j, "term_compliance");
  d.term_wil = get<double>(j, "term_wil");
  d.term_realism = get<double>(j, "term_realism");
  d.dominant = parse_enum(j, "dominant", metrics::parse_rationale);
  return d;
}

decision::Verdict decode_verdict(const json& j) {
  decision::Verdict v;
  v.predicted = parse_enum(j, "predicted", parse_label);
  v.m = get<double>(j, "m");
  v.confidence_raw = get<double>(j, "confidence_raw");
  v.confidence_calibrated = get<double>(j, "confidence_calibrated");
  v.routing = parse_enum(j, "routing", decision::parse_routing);
  v.tag = parse_enum(j, "tag", decision::parse_tag);
  v.rationale = parse_enum(j, "rationale", metrics::parse_rationale);
  return v;
}

}  // namespace pitch::codec
