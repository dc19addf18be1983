#include "pitch/records.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace pitch {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(int line_no, const std::string& what) {
  throw Error(ErrorCode::SchemaError, "line " + std::to_string(line_no) + ": " + what);
}

template <class T>
T field(const json& record, const char* name, int line_no) {
  const auto it = record.find(name);
  if (it == record.end()) schema_error(line_no, std::string("missing field '") + name + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    schema_error(line_no, std::string("field '") + name + "' has the wrong type");
  }
}

double finite_field(const json& record, const char* name, int line_no) {
  const double v = field<double>(record, name, line_no);
  if (!std::isfinite(v)) schema_error(line_no, std::string("field '") + name + "' is not finite");
  return v;
}

Label label_field(const json& record, const char* name, int line_no) {
  const auto text = field<std::string>(record, name, line_no);
  if (text == "Real") return Label::Real;
  if (text == "Fake") return Label::Fake;
  schema_error(line_no, std::string("field '") + name + "' must be Real or Fake");
}

template <class Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      schema_error(line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!record.is_object()) schema_error(line_no, "record is not an object");
    fn(record, line_no);
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<ScoreRecord> read_score_records(std::istream& in, bool allow_unlabeled) {
  std::vector<ScoreRecord> records;
  for_each_record(in, [&](const json& j, int line_no) {
    ScoreRecord r;
    r.sample_id = field<std::string>(j, "sample_id", line_no);
    r.challenge_id = field<int>(j, "challenge_id", line_no);
    const auto label = field<std::string>(j, "label", line_no);
    if (label == "Unknown") {
      if (!allow_unlabeled) schema_error(line_no, "label Unknown is only valid for live data");
    } else {
      r.label = label_field(j, "label", line_no);
    }
    r.subject_id = field<std::string>(j, "subject_id", line_no);
    if (const auto it = j.find("impostor_id"); it != j.end() && !it->is_null()) {
      r.impostor_id = field<std::string>(j, "impostor_id", line_no);
    }
    if (const auto it = j.find("audio_uri"); it != j.end() && !it->is_null()) {
      r.audio_uri = field<std::string>(j, "audio_uri", line_no);
    }
    r.compliance_prob = finite_field(j, "compliance_prob", line_no);
    r.pmos = finite_field(j, "pmos", line_no);
    r.transcript = field<std::string>(j, "transcript", line_no);
    r.reference_text = field<std::string>(j, "reference_text", line_no);
    r.speaker_match = finite_field(j, "speaker_match", line_no);
    if (r.compliance_prob < 0.0 || r.compliance_prob > 1.0) {
      schema_error(line_no, "compliance_prob outside [0, 1]");
    }
    if (r.speaker_match < -1.0 || r.speaker_match > 1.0) {
      schema_error(line_no, "speaker_match outside [-1, 1]");
    }
    records.push_back(std::move(r));
  });
  return records;
}

std::vector<ScoreRecord> load_score_records(const std::filesystem::path& path, bool allow_unlabeled) {
  auto in = open_input(path);
  return read_score_records(in, allow_unlabeled);
}

std::vector<DecisionRecord> read_decision_records(std::istream& in) {
  std::vector<DecisionRecord> records;
  for_each_record(in, [&](const json& j, int line_no) {
    DecisionRecord r;
    r.sample_id = j.value("sample_id", "");
    r.reviewer_id = j.value("reviewer_id", "");
    r.challenge_id = field<int>(j, "challenge_id", line_no);
    r.initial_decision = label_field(j, "initial_decision", line_no);
    r.initial_confidence = field<int>(j, "initial_confidence", line_no);
    r.machine_m = finite_field(j, "machine_m", line_no);
    r.final_decision = label_field(j, "final_decision", line_no);
    r.final_confidence = field<int>(j, "final_confidence", line_no);
    r.truth_label = label_field(j, "truth_label", line_no);
    r.rationale_shown = field<bool>(j, "rationale_shown", line_no);
    if (r.machine_m < 0.0 || r.machine_m > 1.0) schema_error(line_no, "machine_m outside [0, 1]");
    for (const int c : {r.initial_confidence, r.final_confidence}) {
      if (c < 0 || c > 100) schema_error(line_no, "confidence outside 0..100");
    }
    records.push_back(std::move(r));
  });
  return records;
}

std::vector<DecisionRecord> load_decision_records(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_decision_records(in);
}

void write_score_records(std::ostream& out, const std::vector<ScoreRecord>& records) {
  for (const auto& r : records) {
    json j;
    j["sample_id"] = r.sample_id;
    j["challenge_id"] = r.challenge_id;
    j["label"] = r.label ? std::string(to_string(*r.label)) : std::string("Unknown");
    j["subject_id"] = r.subject_id;
    j["impostor_id"] = r.impostor_id ? json(*r.impostor_id) : json(nullptr);
    if (r.audio_uri) j["audio_uri"] = *r.audio_uri;
    j["compliance_prob"] = r.compliance_prob;
    j["pmos"] = r.pmos;
    j["transcript"] = r.transcript;
    j["reference_text"] = r.reference_text;
    j["speaker_match"] = r.speaker_match;
    out << j.dump() << '\n';
  }
}

void write_decision_records(std::ostream& out, const std::vector<DecisionRecord>& records) {
  for (const auto& r : records) {
    json j;
    j["sample_id"] = r.sample_id;
    j["reviewer_id"] = r.reviewer_id;
    j["challenge_id"] = r.challenge_id;
    j["initial_decision"] = to_string(r.initial_decision);
    j["initial_confidence"] = r.initial_confidence;
    j["machine_m"] = r.machine_m;
    j["final_decision"] = to_string(r.final_decision);
    j["final_confidence"] = r.final_confidence;
    j["truth_label"] = to_string(r.truth_label);
    j["rationale_shown"] = r.rationale_shown;
    out << j.dump() << '\n';
  }
}

}  // namespace pitch
