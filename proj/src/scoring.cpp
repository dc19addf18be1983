#include "pitch/scoring.hpp"

#include <cctype>
#include <cmath>

#include "pitch/catalog.hpp"

namespace pitch::scoring {

FixtureScorer::FixtureScorer(std::vector<ScoreRecord> records) : records_(std::move(records)) {
  index_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!index_.emplace(records_[i].sample_id, i).second) {
      throw Error(ErrorCode::SchemaError, "duplicate sample_id '" + records_[i].sample_id + "'");
    }
  }
}

const ScoreRecord& FixtureScorer::record(std::string_view sample_id) const {
  const auto it = index_.find(std::string(sample_id));
  if (it == index_.end()) {
    throw Error(ErrorCode::SampleNotFound, "no fixture record for '" + std::string(sample_id) + "'");
  }
  return records_[it->second];
}

double FixtureScorer::score_compliance(const SampleRef& sample) {
  return record(sample.sample_id).compliance_prob;
}

double FixtureScorer::score_realism(const SampleRef& sample) { return record(sample.sample_id).pmos; }

std::string FixtureScorer::transcribe(const SampleRef& sample) {
  return record(sample.sample_id).transcript;
}

double FixtureScorer::match_speaker(const SampleRef& sample, const SampleRef& target) {
  record(target.sample_id);
  return record(sample.sample_id).speaker_match;
}

double question_compliance(std::string_view transcript) {
  auto end = transcript.find_last_not_of(" \t\r\n");
  if (end == std::string_view::npos) return 0.0;
  return transcript[end] == '?' ? 1.0 : 0.0;
}

double foreign_words_compliance(std::string_view transcript, std::string_view script,
                                double wer_threshold) {
  return metrics::wer(script, transcript) < wer_threshold ? 1.0 : 0.0;
}

HeuristicComplianceScorer::HeuristicComplianceScorer(std::shared_ptr<Transcriber> transcriber,
                                                     std::shared_ptr<ComplianceScorer> fallback,
                                                     double foreign_wer_threshold)
    : transcriber_(std::move(transcriber)),
      fallback_(std::move(fallback)),
      foreign_wer_threshold_(foreign_wer_threshold) {}

double HeuristicComplianceScorer::score_compliance(const SampleRef& sample) {
  if (sample.challenge_id == catalog::kQuestion) {
    return question_compliance(transcriber_->transcribe(sample));
  }
  if (sample.challenge_id == catalog::kForeignWords) {
    return foreign_words_compliance(transcriber_->transcribe(sample), sample.reference_text,
                                    foreign_wer_threshold_);
  }
  if (!fallback_) {
    throw Error(ErrorCode::AdapterUnavailable,
                "no compliance classifier for challenge " + std::to_string(sample.challenge_id));
  }
  return fallback_->score_compliance(sample);
}

void ScorerSuite::validate() const {
  if (!compliance || !realism || !transcriber || !speaker_matcher) {
    throw Error(ErrorCode::ConfigError, "scorer suite needs all four adapters");
  }
}

double score_compliance(ComplianceScorer& adapter, const SampleRef& sample) {
  const double p = adapter.score_compliance(sample);
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::AdapterUnavailable, "compliance adapter returned out-of-range value");
  }
  return p;
}

double score_realism(RealismScorer& adapter, const SampleRef& sample) {
  const double pmos = adapter.score_realism(sample);
  if (!std::isfinite(pmos)) {
    throw Error(ErrorCode::AdapterUnavailable, "realism adapter returned a non-finite value");
  }
  return metrics::clamp_pmos(pmos);
}

std::string transcribe(Transcriber& adapter, const SampleRef& sample) {
  return adapter.transcribe(sample);
}

double match_speaker(SpeakerMatcher& adapter, const SampleRef& sample, const SampleRef& target) {
  const double s = adapter.match_speaker(sample, target);
  if (!(s >= -1.0 && s <= 1.0)) {
    throw Error(ErrorCode::AdapterUnavailable, "speaker adapter returned out-of-range value");
  }
  return s;
}

metrics::ComponentScores score_components(const ScorerSuite& suite, const SampleRef& sample) {
  suite.validate();
  metrics::ComponentScores scores;
  const std::string transcript = transcribe(*suite.transcriber, sample);
  scores.compliance = metrics::binarize_compliance(score_compliance(*suite.compliance, sample));
  scores.realism_pmos = score_realism(*suite.realism, sample);
  scores.wil_applicable = sample.challenge_id != catalog::kCoughWhistle;
  scores.wil = scores.wil_applicable ? metrics::wil(sample.reference_text, transcript) : 0.0;
  return scores;
}

metrics::ComponentScores components_from_record(const ScoreRecord& record) {
  metrics::ComponentScores scores;
  scores.compliance = metrics::binarize_compliance(record.compliance_prob);
  scores.realism_pmos = metrics::clamp_pmos(record.pmos);
  scores.wil_applicable = record.challenge_id != catalog::kCoughWhistle;
  scores.wil = scores.wil_applicable ? metrics::wil(record.reference_text, record.transcript) : 0.0;
  return scores;
}

}  // namespace pitch::scoring
