#include <algorithm>

#include "detail.hpp"

namespace pitch::eval {

std::vector<double> degradation_scores(std::span<const ScoreRecord> records) {
  std::vector<double> m(records.size());
  detail::ErrorSlot errors;
  const auto n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      m[k] = detail::degradation_of(records[k]);
    } catch (...) {
      errors.capture(k, std::current_exception());
    }
  }
  errors.rethrow_if_any();
  return m;
}

EvalReport evaluate_scores(std::span<const ScoreRecord> records, const decision::CalibrationConfig& cfg) {
  cfg.validate();
  detail::check_labeled(records);
  const auto m = degradation_scores(records);

  auto buckets = detail::bucket_by_challenge(records, m);
  std::vector<ChallengeStats> stats(buckets.size());
  const auto n_buckets = static_cast<std::ptrdiff_t>(buckets.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t b = 0; b < n_buckets; ++b) {
    const auto k = static_cast<std::size_t>(b);
    stats[k] = detail::group_stats(buckets[k].second, cfg.tau_base);
  }

  EvalReport report;
  report.config = cfg;
  for (std::size_t k = 0; k < buckets.size(); ++k) report.per_challenge[buckets[k].first] = stats[k];

  std::vector<metrics::LabeledScore> pooled;
  pooled.reserve(records.size());
  for (auto& [id, group] : buckets) pooled.insert(pooled.end(), group.begin(), group.end());
  report.overall = detail::group_stats(pooled, cfg.tau_base);
  detail::finish_report(report);
  return report;
}

std::vector<TradeoffPoint> temperature_sweep(std::span<const DecisionRecord> decisions,
                                             std::span<const double> t_grid,
                                             const decision::CalibrationConfig& cfg) {
  detail::check_grid(t_grid);
  if (decisions.empty()) throw Error(ErrorCode::EmptyInput, "no decision records");
  std::vector<double> grid(t_grid.begin(), t_grid.end());
  std::stable_sort(grid.begin(), grid.end());

  std::vector<TradeoffPoint> points(grid.size());
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    auto at_t = cfg;
    at_t.temperature = grid[k];
    const ReplayStats s = detail::replay_stats(decisions, at_t);
    points[k] = {grid[k], s.automated_fraction, s.collaborative_acc};
  }
  return points;
}

}  // namespace pitch::eval
