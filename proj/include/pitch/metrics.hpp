#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pitch/common.hpp"

namespace pitch::metrics {

/// Explanation categories a reviewer sees next to a machine verdict.
/// `None` appears only on verdicts; degradation results always name one of
/// the three components.
enum class Rationale { None, TaskFailure, TextMismatch, VocalDistortion };

std::string_view to_string(Rationale rationale);
Rationale parse_rationale(std::string_view text);

/// Lowercases, strips ASCII punctuation and splits on whitespace.
std::vector<std::string> tokenize(std::string_view text);

struct AlignmentCounts {
  int hits = 0;
  int substitutions = 0;
  int deletions = 0;
  int insertions = 0;

  int cost() const { return substitutions + deletions + insertions; }
};

/// Minimum edit-distance word alignment (unit costs). Among alignments of
/// minimum cost the one with the most hits is reported.
template <class Token>
AlignmentCounts align(std::span<const Token> reference, std::span<const Token> hypothesis) {
  struct Cell {
    int cost;
    int hits;
    int subs;
  };
  const std::size_t n = reference.size();
  const std::size_t p = hypothesis.size();
  std::vector<Cell> prev(p + 1), cur(p + 1);
  for (std::size_t j = 0; j <= p; ++j) prev[j] = {static_cast<int>(j), 0, 0};

  auto better = [](const Cell& a, const Cell& b) {
    return a.cost != b.cost ? a.cost < b.cost : a.hits > b.hits;
  };
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = {static_cast<int>(i), 0, 0};
    for (std::size_t j = 1; j <= p; ++j) {
      const bool hit = reference[i - 1] == hypothesis[j - 1];
      Cell best = {prev[j - 1].cost + (hit ? 0 : 1), prev[j - 1].hits + (hit ? 1 : 0),
                   prev[j - 1].subs + (hit ? 0 : 1)};
      const Cell del = {prev[j].cost + 1, prev[j].hits, prev[j].subs};
      const Cell ins = {cur[j - 1].cost + 1, cur[j - 1].hits, cur[j - 1].subs};
      if (better(del, best)) best = del;
      if (better(ins, best)) best = ins;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  const Cell& end = prev[p];
  AlignmentCounts counts;
  counts.hits = end.hits;
  counts.substitutions = end.subs;
  counts.deletions = static_cast<int>(n) - end.hits - end.subs;
  counts.insertions = static_cast<int>(p) - end.hits - end.subs;
  return counts;
}

/// Word Information Lost, 1 - H^2 / (N * P). An empty hypothesis scores 1.
/// Throws InvalidReference for an empty reference.
double wil(std::span<const std::string> reference, std::span<const std::string> hypothesis);
double wil(std::string_view reference, std::string_view hypothesis);

/// Word error rate (S + D + I) / N on tokenized text.
double wer(std::string_view reference, std::string_view hypothesis);

struct ComponentScores {
  int compliance = 1;
  double wil = 0.0;
  double realism_pmos = 5.0;
  bool wil_applicable = true;
};

struct DegradationResult {
  double m = 0.0;
  double term_compliance = 0.0;
  double term_wil = 0.0;
  double term_realism = 0.0;
  Rationale dominant = Rationale::TaskFailure;

  bool operator==(const DegradationResult&) const = default;
};

/// Equal-weight fusion of non-compliance, information loss and unrealism.
/// With wil_applicable == false the WIL term is dropped and m is the mean
/// of the remaining two terms.
DegradationResult machine_degradation(const ComponentScores& scores);

struct HumanRating {
  int compliant = 1;
  int realism_likert = 5;
};

/// 1 - min(compliant, likert / 5).
double human_degradation(const HumanRating& rating);

struct LabeledScore {
  double score = 0.0;
  Label label = Label::Real;
};

/// Mann-Whitney AUROC with Fake as the positive class and midrank ties.
/// Throws InsufficientClasses unless both labels are present.
double auroc(std::span<const LabeledScore> scores);

/// Fraction of samples where (score > threshold) == (label == Fake).
double accuracy_at(std::span<const LabeledScore> scores, double threshold);

/// Compliance probabilities at or above one half count as compliant.
int binarize_compliance(double probability);

/// Clamps an adapter pMOS into [1, 5], logging a warning when it moves.
double clamp_pmos(double pmos);

/// Sample Pearson correlation. Throws InvalidArgument on size mismatch,
/// fewer than two points, or zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace pitch::metrics
