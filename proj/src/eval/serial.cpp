#include <algorithm>

#include "detail.hpp"

namespace pitch::eval::serial {

std::vector<double> degradation_scores(std::span<const ScoreRecord> records) {
  std::vector<double> m;
  m.reserve(records.size());
  for (const auto& r : records) m.push_back(detail::degradation_of(r));
  return m;
}

EvalReport evaluate_scores(std::span<const ScoreRecord> records, const decision::CalibrationConfig& cfg) {
  cfg.validate();
  detail::check_labeled(records);
  const auto m = serial::degradation_scores(records);

  EvalReport report;
  report.config = cfg;
  std::vector<metrics::LabeledScore> pooled;
  for (auto& [id, group] : detail::bucket_by_challenge(records, m)) {
    report.per_challenge[id] = detail::group_stats(group, cfg.tau_base);
    pooled.insert(pooled.end(), group.begin(), group.end());
  }
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
  std::vector<TradeoffPoint> points;
  for (const double t : grid) {
    auto at_t = cfg;
    at_t.temperature = t;
    const ReplayStats s = detail::replay_stats(decisions, at_t);
    points.push_back({t, s.automated_fraction, s.collaborative_acc});
  }
  return points;
}

}  // namespace pitch::eval::serial
