#pragma once

#include <exception>
#include <map>
#include <vector>

#include "pitch/eval.hpp"
#include "pitch/metrics.hpp"

namespace pitch::eval::detail {

void check_labeled(std::span<const ScoreRecord> records);

double degradation_of(const ScoreRecord& record);

/// Group statistics; sorts `group` in place so the result does not depend
/// on the incoming order.
ChallengeStats group_stats(std::vector<metrics::LabeledScore>& group, double tau);

/// (challenge id, labeled m) buckets in ascending challenge order.
std::vector<std::pair<int, std::vector<metrics::LabeledScore>>> bucket_by_challenge(
    std::span<const ScoreRecord> records, std::span<const double> m);

/// Averages and notes over finished per-challenge stats.
void finish_report(EvalReport& report);

ReplayStats replay_stats(std::span<const DecisionRecord> decisions,
                         const decision::CalibrationConfig& cfg);

void check_grid(std::span<const double> t_grid);

/// Collects the first exception (by loop index) raised inside a parallel
/// region and rethrows it after the region ends.
class ErrorSlot {
 public:
  void capture(std::size_t index, std::exception_ptr error);
  void rethrow_if_any() const;

 private:
  std::size_t index_ = static_cast<std::size_t>(-1);
  std::exception_ptr error_;
};

}  // namespace pitch::eval::detail
