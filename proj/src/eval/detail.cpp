#include "detail.hpp"

#include <algorithm>
#include <mutex>

#include "pitch/catalog.hpp"
#include "pitch/scoring.hpp"

namespace pitch::eval::detail {

void check_labeled(std::span<const ScoreRecord> records) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no score records to evaluate");
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].label) {
      throw Error(ErrorCode::SchemaError,
                  "record " + std::to_string(i) + " ('" + records[i].sample_id + "') is unlabeled");
    }
  }
}

double degradation_of(const ScoreRecord& record) {
  return metrics::machine_degradation(scoring::components_from_record(record)).m;
}

ChallengeStats group_stats(std::vector<metrics::LabeledScore>& group, double tau) {
  std::sort(group.begin(), group.end(), [](const auto& a, const auto& b) {
    return a.score != b.score ? a.score < b.score : a.label < b.label;
  });
  ChallengeStats stats;
  double sum_fake = 0.0, sum_real = 0.0;
  for (const auto& s : group) {
    if (s.label == Label::Fake) {
      sum_fake += s.score;
      ++stats.n_fake;
    } else {
      sum_real += s.score;
      ++stats.n_real;
    }
  }
  if (stats.n_fake > 0) stats.mean_m_fake = sum_fake / static_cast<double>(stats.n_fake);
  if (stats.n_real > 0) stats.mean_m_real = sum_real / static_cast<double>(stats.n_real);
  stats.accuracy = metrics::accuracy_at(group, tau);
  if (stats.n_fake > 0 && stats.n_real > 0) stats.auc = metrics::auroc(group);
  return stats;
}

std::vector<std::pair<int, std::vector<metrics::LabeledScore>>> bucket_by_challenge(
    std::span<const ScoreRecord> records, std::span<const double> m) {
  std::map<int, std::vector<metrics::LabeledScore>> buckets;
  for (std::size_t i = 0; i < records.size(); ++i) {
    buckets[records[i].challenge_id].push_back({m[i], *records[i].label});
  }
  return {std::make_move_iterator(buckets.begin()), std::make_move_iterator(buckets.end())};
}

void finish_report(EvalReport& report) {
  const auto& catalog = catalog::Catalog::embedded();
  double top_auc = 0.0, all_auc = 0.0, top_acc = 0.0, all_acc = 0.0;
  int top_n = 0, all_n = 0;
  for (const auto& [id, stats] : report.per_challenge) {
    if (!stats.auc) {
      report.notes.push_back("challenge " + std::to_string(id) +
                             ": InsufficientClasses, excluded from averages");
      continue;
    }
    const bool qualified = id >= 0 && id < catalog::kChallengeCount && catalog.challenge(id).qualified;
    all_auc += *stats.auc;
    all_acc += stats.accuracy;
    ++all_n;
    if (qualified) {
      top_auc += *stats.auc;
      top_acc += stats.accuracy;
      ++top_n;
    }
  }
  if (all_n > 0) {
    report.all_mean_auc = all_auc / all_n;
    report.all_mean_accuracy = all_acc / all_n;
  }
  if (top_n > 0) {
    report.top10_mean_auc = top_auc / top_n;
    report.top10_mean_accuracy = top_acc / top_n;
  }
}

ReplayStats replay_stats(std::span<const DecisionRecord> decisions,
                         const decision::CalibrationConfig& cfg) {
  ReplayStats stats;
  std::size_t human = 0, assisted = 0, collab = 0, machine = 0, automated = 0;
  for (const auto& d : decisions) {
    const Label machine_label = d.machine_m > cfg.tau_base ? Label::Fake : Label::Real;
    const bool automate = decision::is_automated(d.machine_m, cfg);
    human += d.initial_decision == d.truth_label;
    assisted += d.final_decision == d.truth_label;
    machine += machine_label == d.truth_label;
    automated += automate;
    collab += (automate ? machine_label : d.final_decision) == d.truth_label;
  }
  const double n = static_cast<double>(decisions.size());
  stats.n = decisions.size();
  if (stats.n == 0) return stats;
  stats.human_only_acc = static_cast<double>(human) / n;
  stats.assisted_acc = static_cast<double>(assisted) / n;
  stats.collaborative_acc = static_cast<double>(collab) / n;
  stats.machine_acc = static_cast<double>(machine) / n;
  stats.automated_fraction = static_cast<double>(automated) / n;
  return stats;
}

void check_grid(std::span<const double> t_grid) {
  if (t_grid.empty()) throw Error(ErrorCode::InvalidTemperature, "temperature grid is empty");
  for (const double t : t_grid) {
    if (!(t > 0.0)) {
      throw Error(ErrorCode::InvalidTemperature, "temperature " + std::to_string(t) + " is not positive");
    }
  }
}

void ErrorSlot::capture(std::size_t index, std::exception_ptr error) {
  static std::mutex guard;
  std::lock_guard lock(guard);
  if (!error_ || index < index_) {
    index_ = index;
    error_ = std::move(error);
  }
}

void ErrorSlot::rethrow_if_any() const {
  if (error_) std::rethrow_exception(error_);
}

}  // namespace pitch::eval::detail
