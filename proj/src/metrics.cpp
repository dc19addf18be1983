#include "pitch/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include <spdlog/spdlog.h>

namespace pitch::metrics {

namespace {

void require(bool condition, const char* message) {
  if (!condition) throw Error(ErrorCode::InvalidArgument, message);
}

}  // namespace

std::string_view to_string(Rationale rationale) {
  switch (rationale) {
    case Rationale::None: return "None";
    case Rationale::TaskFailure: return "TaskFailure";
    case Rationale::TextMismatch: return "TextMismatch";
    case Rationale::VocalDistortion: return "VocalDistortion";
  }
  return "None";
}

Rationale parse_rationale(std::string_view text) {
  if (text == "None") return Rationale::None;
  if (text == "TaskFailure") return Rationale::TaskFailure;
  if (text == "TextMismatch") return Rationale::TextMismatch;
  if (text == "VocalDistortion") return Rationale::VocalDistortion;
  throw Error(ErrorCode::SchemaError, "unknown rationale '" + std::string(text) + "'");
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (const char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else if (!std::ispunct(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

double wil(std::span<const std::string> reference, std::span<const std::string> hypothesis) {
  if (reference.empty()) throw Error(ErrorCode::InvalidReference, "WIL needs a non-empty reference");
  if (hypothesis.empty()) return 1.0;
  const AlignmentCounts counts = align(reference, hypothesis);
  const double h = counts.hits;
  return 1.0 - (h * h) / (static_cast<double>(reference.size()) * static_cast<double>(hypothesis.size()));
}

double wil(std::string_view reference, std::string_view hypothesis) {
  const auto ref = tokenize(reference);
  const auto hyp = tokenize(hypothesis);
  return wil(std::span<const std::string>(ref), std::span<const std::string>(hyp));
}

double wer(std::string_view reference, std::string_view hypothesis) {
  const auto ref = tokenize(reference);
  const auto hyp = tokenize(hypothesis);
  if (ref.empty()) throw Error(ErrorCode::InvalidReference, "WER needs a non-empty reference");
  const AlignmentCounts counts =
      align(std::span<const std::string>(ref), std::span<const std::string>(hyp));
  return static_cast<double>(counts.cost()) / static_cast<double>(ref.size());
}

DegradationResult machine_degradation(const ComponentScores& scores) {
  require(scores.compliance == 0 || scores.compliance == 1, "compliance must be 0 or 1");
  require(scores.wil >= 0.0 && scores.wil <= 1.0, "WIL must lie in [0, 1]");
  require(scores.realism_pmos >= 1.0 && scores.realism_pmos <= 5.0, "pMOS must lie in [1, 5]");

  DegradationResult result;
  result.term_compliance = 1.0 - scores.compliance;
  result.term_realism = 1.0 - scores.realism_pmos / 5.0;
  if (scores.wil_applicable) {
    result.term_wil = scores.wil;
    result.m = (result.term_compliance + result.term_wil + result.term_realism) / 3.0;
  } else {
    result.term_wil = 0.0;
    result.m = (result.term_compliance + result.term_realism) / 2.0;
  }

  // Ties resolve in declaration order: task failure, text, distortion.
  result.dominant = Rationale::TaskFailure;
  double best = result.term_compliance;
  if (scores.wil_applicable && result.term_wil > best) {
    best = result.term_wil;
    result.dominant = Rationale::TextMismatch;
  }
  if (result.term_realism > best) result.dominant = Rationale::VocalDistortion;
  return result;
}

double human_degradation(const HumanRating& rating) {
  require(rating.compliant == 0 || rating.compliant == 1, "compliant must be 0 or 1");
  require(rating.realism_likert >= 1 && rating.realism_likert <= 5, "Likert rating must be 1..5");
  return 1.0 - std::min(static_cast<double>(rating.compliant), rating.realism_likert / 5.0);
}

double auroc(std::span<const LabeledScore> scores) {
  std::vector<LabeledScore> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(), [](const LabeledScore& a, const LabeledScore& b) {
    return a.score < b.score;
  });

  double fake_rank_sum = 0.0;
  std::size_t n_fake = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) ++j;
    // 1-based ranks i+1 .. j share their mean.
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (sorted[k].label == Label::Fake) {
        fake_rank_sum += midrank;
        ++n_fake;
      }
    }
    i = j;
  }
  const std::size_t n_real = sorted.size() - n_fake;
  if (n_fake == 0 || n_real == 0) {
    throw Error(ErrorCode::InsufficientClasses, "AUROC needs both Real and Fake samples");
  }
  const double nf = static_cast<double>(n_fake);
  const double u = fake_rank_sum - nf * (nf + 1.0) / 2.0;
  return u / (nf * static_cast<double>(n_real));
}

double accuracy_at(std::span<const LabeledScore> scores, double threshold) {
  if (scores.empty()) throw Error(ErrorCode::EmptyInput, "accuracy needs at least one sample");
  std::size_t correct = 0;
  for (const auto& s : scores) {
    if ((s.score > threshold) == (s.label == Label::Fake)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

int binarize_compliance(double probability) { return probability >= 0.5 ? 1 : 0; }

double clamp_pmos(double pmos) {
  const double clamped = std::clamp(pmos, 1.0, 5.0);
  if (clamped != pmos) spdlog::warn("pMOS {} outside [1, 5], clamped to {}", pmos, clamped);
  return clamped;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "pearson: inputs differ in length");
  require(x.size() >= 2, "pearson: need at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0 && syy > 0.0, "pearson: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace pitch::metrics
