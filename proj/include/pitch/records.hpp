#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pitch/common.hpp"

namespace pitch {

/// One sample's scorer outputs. Doubles as the fixture-adapter store and
/// the evaluation dataset row. `label` is empty for live (unlabeled) data.
struct ScoreRecord {
  std::string sample_id;
  int challenge_id = 0;
  std::optional<Label> label;
  std::string subject_id;
  std::optional<std::string> impostor_id;
  std::optional<std::string> audio_uri;
  double compliance_prob = 1.0;
  double pmos = 5.0;
  std::string transcript;
  std::string reference_text;
  double speaker_match = 1.0;

  bool operator==(const ScoreRecord&) const = default;
};

/// One (sample, reviewer) response from the two-stage review study.
struct DecisionRecord {
  std::string sample_id;
  std::string reviewer_id;
  int challenge_id = 0;
  Label initial_decision = Label::Real;
  int initial_confidence = 50;
  double machine_m = 0.0;
  Label final_decision = Label::Real;
  int final_confidence = 50;
  Label truth_label = Label::Real;
  bool rationale_shown = false;

  bool operator==(const DecisionRecord&) const = default;
};

/// Line-delimited JSON readers. Blank lines are skipped, unknown fields are
/// ignored, and a missing or mistyped mandatory field throws SchemaError
/// naming the 1-based line number.
std::vector<ScoreRecord> read_score_records(std::istream& in, bool allow_unlabeled = false);
std::vector<ScoreRecord> load_score_records(const std::filesystem::path& path,
                                            bool allow_unlabeled = false);
std::vector<DecisionRecord> read_decision_records(std::istream& in);
std::vector<DecisionRecord> load_decision_records(const std::filesystem::path& path);

void write_score_records(std::ostream& out, const std::vector<ScoreRecord>& records);
void write_decision_records(std::ostream& out, const std::vector<DecisionRecord>& records);

}  // namespace pitch
