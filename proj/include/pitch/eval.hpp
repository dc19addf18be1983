#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pitch/decision.hpp"
#include "pitch/records.hpp"

namespace pitch::eval {

struct ChallengeStats {
  /// Empty when the group holds only one class.
  std::optional<double> auc;
  double accuracy = 0.0;
  double mean_m_fake = 0.0;
  double mean_m_real = 0.0;
  std::size_t n_fake = 0;
  std::size_t n_real = 0;

  bool operator==(const ChallengeStats&) const = default;
};

struct EvalReport {
  std::map<int, ChallengeStats> per_challenge;
  /// Pooled over every record.
  ChallengeStats overall;
  /// Unweighted means of per-challenge values over the qualified challenges
  /// and over all challenges, skipping single-class groups.
  std::optional<double> top10_mean_auc;
  std::optional<double> all_mean_auc;
  std::optional<double> top10_mean_accuracy;
  std::optional<double> all_mean_accuracy;
  decision::CalibrationConfig config;
  std::vector<std::string> notes;

  bool operator==(const EvalReport&) const = default;
};

/// Per-record machine degradation m, in input order (OpenMP).
std::vector<double> degradation_scores(std::span<const ScoreRecord> records);

/// Per-challenge AUROC / accuracy table. Order-invariant: shuffling the
/// input yields a bit-identical report. Throws EmptyInput on no records and
/// SchemaError on unlabeled ones.
EvalReport evaluate_scores(std::span<const ScoreRecord> records, const decision::CalibrationConfig& cfg);

struct SubsetConfig {
  double match_threshold = 0.50;
  double pmos_center = 4.50;
  double pmos_halfwidth = 0.25;
  std::size_t per_challenge = 147;
  std::uint64_t seed = 0;
};

bool subset_eligible(const ScoreRecord& record, const SubsetConfig& cfg);

/// Keeps records with speaker_match >= threshold and pMOS within the band,
/// then draws `per_challenge` of them per challenge without replacement.
/// Output is ordered by (challenge_id, sample_id). Throws
/// InsufficientEligible naming the first short challenge.
std::vector<ScoreRecord> build_balanced_subset(std::span<const ScoreRecord> records,
                                               const SubsetConfig& cfg);

struct ReplayStats {
  double human_only_acc = 0.0;
  double assisted_acc = 0.0;
  double collaborative_acc = 0.0;
  double machine_acc = 0.0;
  double automated_fraction = 0.0;
  std::size_t n = 0;

  bool operator==(const ReplayStats&) const = default;
};

struct ReplayResult {
  ReplayStats overall;
  std::map<int, ReplayStats> per_challenge;

  bool operator==(const ReplayResult&) const = default;
};

/// Human-only (initial), assisted (final) and collaborative accuracy, where
/// the machine label replaces the human final decision whenever the
/// calibrated confidence clears the automation threshold.
ReplayResult collaborative_replay(std::span<const DecisionRecord> decisions,
                                  const decision::CalibrationConfig& cfg);

struct TradeoffPoint {
  double temperature = 0.0;
  double automated_fraction = 0.0;
  double accuracy = 0.0;

  bool operator==(const TradeoffPoint&) const = default;
};

/// One collaborative replay per temperature (OpenMP over the grid), sorted
/// by temperature. Throws InvalidTemperature for T <= 0.
std::vector<TradeoffPoint> temperature_sweep(std::span<const DecisionRecord> decisions,
                                             std::span<const double> t_grid,
                                             const decision::CalibrationConfig& cfg);

/// Kendall's coefficient of concordance for an evaluators x samples matrix,
/// midranks for ties with the usual tie correction.
double kendall_w(const std::vector<std::vector<double>>& ratings);

/// Single-threaded reference implementations of the OpenMP kernels above.
/// Results are required to be bit-identical.
namespace serial {
std::vector<double> degradation_scores(std::span<const ScoreRecord> records);
EvalReport evaluate_scores(std::span<const ScoreRecord> records, const decision::CalibrationConfig& cfg);
std::vector<TradeoffPoint> temperature_sweep(std::span<const DecisionRecord> decisions,
                                             std::span<const double> t_grid,
                                             const decision::CalibrationConfig& cfg);
}  // namespace serial

// Report rendering.
std::string format_score_table(const EvalReport& report);
std::string format_replay_table(const ReplayResult& result);
std::string report_to_json(const EvalReport& report);
std::string replay_to_json(const ReplayResult& result);
std::string sweep_to_csv(std::span<const TradeoffPoint> points);
std::string sweep_to_svg(std::span<const TradeoffPoint> points);

}  // namespace pitch::eval
