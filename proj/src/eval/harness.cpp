#include <algorithm>
#include <cmath>
#include <map>

#include "detail.hpp"
#include "pitch/rng.hpp"

namespace pitch::eval {

bool subset_eligible(const ScoreRecord& record, const SubsetConfig& cfg) {
  return record.speaker_match >= cfg.match_threshold &&
         std::abs(record.pmos - cfg.pmos_center) <= cfg.pmos_halfwidth;
}

std::vector<ScoreRecord> build_balanced_subset(std::span<const ScoreRecord> records,
                                               const SubsetConfig& cfg) {
  std::map<int, std::vector<const ScoreRecord*>> eligible;
  // Every challenge present in the input must be able to fill its quota.
  for (const auto& r : records) eligible.try_emplace(r.challenge_id);
  for (const auto& r : records) {
    if (subset_eligible(r, cfg)) eligible[r.challenge_id].push_back(&r);
  }

  std::vector<ScoreRecord> out;
  for (auto& [id, pool] : eligible) {
    if (pool.size() < cfg.per_challenge) {
      throw Error(ErrorCode::InsufficientEligible,
                  "challenge " + std::to_string(id) + " has " + std::to_string(pool.size()) +
                      " eligible records, " + std::to_string(cfg.per_challenge) + " requested");
    }
    std::sort(pool.begin(), pool.end(),
              [](const auto* a, const auto* b) { return a->sample_id < b->sample_id; });
    // Per-challenge stream so the draw for one challenge ignores the others.
    SeededRng rng(cfg.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(id + 1)));
    for (std::size_t i = 0; i < cfg.per_challenge; ++i) {
      const std::size_t j = i + rng.uniform_index(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    std::vector<const ScoreRecord*> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(cfg.per_challenge));
    std::sort(chosen.begin(), chosen.end(),
              [](const auto* a, const auto* b) { return a->sample_id < b->sample_id; });
    for (const auto* r : chosen) out.push_back(*r);
  }
  return out;
}

ReplayResult collaborative_replay(std::span<const DecisionRecord> decisions,
                                  const decision::CalibrationConfig& cfg) {
  cfg.validate();
  if (decisions.empty()) throw Error(ErrorCode::EmptyInput, "no decision records");
  ReplayResult result;
  result.overall = detail::replay_stats(decisions, cfg);
  std::map<int, std::vector<DecisionRecord>> by_challenge;
  for (const auto& d : decisions) by_challenge[d.challenge_id].push_back(d);
  for (const auto& [id, group] : by_challenge) {
    result.per_challenge[id] = detail::replay_stats(group, cfg);
  }
  return result;
}

namespace {

/// 1-based midranks of `row`.
std::vector<double> midranks(const std::vector<double>& row, double& tie_term) {
  std::vector<std::size_t> order(row.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
  std::vector<double> ranks(row.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && row[order[j]] == row[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  return ranks;
}

}  // namespace

double kendall_w(const std::vector<std::vector<double>>& ratings) {
  const std::size_t m = ratings.size();
  if (m < 2) throw Error(ErrorCode::InvalidMatrix, "Kendall's W needs at least two evaluators");
  const std::size_t n = ratings.front().size();
  if (n < 2) throw Error(ErrorCode::InvalidMatrix, "Kendall's W needs at least two samples");
  for (const auto& row : ratings) {
    if (row.size() != n) throw Error(ErrorCode::InvalidMatrix, "ragged rating matrix");
  }

  double tie_term = 0.0;
  std::vector<double> rank_sums(n, 0.0);
  for (const auto& row : ratings) {
    const auto ranks = midranks(row, tie_term);
    for (std::size_t j = 0; j < n; ++j) rank_sums[j] += ranks[j];
  }
  const double mm = static_cast<double>(m);
  const double nn = static_cast<double>(n);
  const double mean = mm * (nn + 1.0) / 2.0;
  double s = 0.0;
  for (const double r : rank_sums) s += (r - mean) * (r - mean);
  const double denom = mm * mm * (nn * nn * nn - nn) - mm * tie_term;
  if (!(denom > 0.0)) throw Error(ErrorCode::InvalidMatrix, "every evaluator gave tied ratings");
  return 12.0 * s / denom;
}

}  // namespace pitch::eval
