#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pitch/metrics.hpp"
#include "pitch/records.hpp"

namespace pitch::scoring {

struct SampleRef {
  std::string sample_id;
  std::optional<std::string> audio_uri;
  int challenge_id = 0;
  std::string reference_text;

  bool operator==(const SampleRef&) const = default;
};

class ComplianceScorer {
 public:
  virtual ~ComplianceScorer() = default;
  /// Probability in [0, 1] that the requested challenge was performed.
  virtual double score_compliance(const SampleRef& sample) = 0;
};

class RealismScorer {
 public:
  virtual ~RealismScorer() = default;
  /// Predicted mean opinion score, nominally in [1, 5].
  virtual double score_realism(const SampleRef& sample) = 0;
};

class Transcriber {
 public:
  virtual ~Transcriber() = default;
  virtual std::string transcribe(const SampleRef& sample) = 0;
};

class SpeakerMatcher {
 public:
  virtual ~SpeakerMatcher() = default;
  /// Voice similarity in [-1, 1].
  virtual double match_speaker(const SampleRef& sample, const SampleRef& target) = 0;
};

/// Serves stored ScoreRecord values by sample_id for all four roles.
/// Immutable after construction, so concurrent reads are safe.
class FixtureScorer final : public ComplianceScorer,
                            public RealismScorer,
                            public Transcriber,
                            public SpeakerMatcher {
 public:
  explicit FixtureScorer(std::vector<ScoreRecord> records);

  double score_compliance(const SampleRef& sample) override;
  double score_realism(const SampleRef& sample) override;
  std::string transcribe(const SampleRef& sample) override;
  double match_speaker(const SampleRef& sample, const SampleRef& target) override;

  const ScoreRecord& record(std::string_view sample_id) const;
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<ScoreRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// 1 when the transcript's final non-space character is '?'.
double question_compliance(std::string_view transcript);

/// 1 when the WER of the transcript against the foreign script is below
/// the threshold.
double foreign_words_compliance(std::string_view transcript, std::string_view script,
                                double wer_threshold = 0.5);

/// Transcript heuristics for the foreign-words and question challenges;
/// every other challenge is delegated to `fallback`.
class HeuristicComplianceScorer final : public ComplianceScorer {
 public:
  HeuristicComplianceScorer(std::shared_ptr<Transcriber> transcriber,
                            std::shared_ptr<ComplianceScorer> fallback,
                            double foreign_wer_threshold = 0.5);

  double score_compliance(const SampleRef& sample) override;

 private:
  std::shared_ptr<Transcriber> transcriber_;
  std::shared_ptr<ComplianceScorer> fallback_;
  double foreign_wer_threshold_;
};

struct ScorerSuite {
  std::shared_ptr<ComplianceScorer> compliance;
  std::shared_ptr<RealismScorer> realism;
  std::shared_ptr<Transcriber> transcriber;
  std::shared_ptr<SpeakerMatcher> speaker_matcher;

  /// Throws ConfigError if any role is missing.
  void validate() const;
};

/// Checked entry points. Out-of-domain compliance or speaker scores surface
/// as AdapterUnavailable; realism is clamped into [1, 5] with a warning.
double score_compliance(ComplianceScorer& adapter, const SampleRef& sample);
double score_realism(RealismScorer& adapter, const SampleRef& sample);
std::string transcribe(Transcriber& adapter, const SampleRef& sample);
double match_speaker(SpeakerMatcher& adapter, const SampleRef& sample, const SampleRef& target);

/// Runs the suite on one response and assembles the degradation inputs.
metrics::ComponentScores score_components(const ScorerSuite& suite, const SampleRef& sample);

/// Degradation inputs computed directly from a stored record (batch path).
metrics::ComponentScores components_from_record(const ScoreRecord& record);

}  // namespace pitch::scoring
