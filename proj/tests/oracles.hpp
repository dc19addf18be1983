#pragma once

// Brute-force reference computations used to check the library. None of
// these share code with src/.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace oracle {

/// Maximum hit count over minimum-cost word alignments, found by
/// enumerating every monotone set of hit pairs. With the hits fixed, each gap
/// between consecutive hits costs max(gap_ref, gap_hyp) (pair up what can be
/// substituted, insert or delete the rest), so
///   cost = N + P - 2H - sum(min(gap_ref, gap_hyp)).
template <class T>
std::pair<int, int> best_alignment(const std::vector<T>& ref, const std::vector<T>& hyp) {
  const int n = static_cast<int>(ref.size());
  const int p = static_cast<int>(hyp.size());
  int best_cost = n + p + 1;
  int best_hits = -1;

  // chain holds (i, j) hit pairs with strictly increasing i and j.
  std::vector<std::pair<int, int>> chain;
  auto evaluate = [&] {
    int saved = 0;
    int pi = -1, pj = -1;
    for (const auto& [i, j] : chain) {
      saved += std::min(i - pi - 1, j - pj - 1);
      pi = i;
      pj = j;
    }
    saved += std::min(n - pi - 1, p - pj - 1);
    const int h = static_cast<int>(chain.size());
    const int cost = n + p - 2 * h - saved;
    if (cost < best_cost || (cost == best_cost && h > best_hits)) {
      best_cost = cost;
      best_hits = h;
    }
  };
  auto extend = [&](auto&& self, int from_i, int from_j) -> void {
    evaluate();
    for (int i = from_i; i < n; ++i) {
      for (int j = from_j; j < p; ++j) {
        if (ref[static_cast<std::size_t>(i)] != hyp[static_cast<std::size_t>(j)]) continue;
        chain.emplace_back(i, j);
        self(self, i + 1, j + 1);
        chain.pop_back();
      }
    }
  };
  extend(extend, 0, 0);
  return {best_cost, best_hits};
}

template <class T>
double wil(const std::vector<T>& ref, const std::vector<T>& hyp) {
  if (hyp.empty()) return 1.0;
  const double h = best_alignment(ref, hyp).second;
  return 1.0 - (h * h) / (static_cast<double>(ref.size()) * static_cast<double>(hyp.size()));
}

/// Probability that a random positive outscores a random negative, ties
/// counted as one half, by visiting every pair.
inline double auroc(const std::vector<double>& positives, const std::vector<double>& negatives) {
  double wins = 0.0;
  for (double a : positives) {
    for (double b : negatives) {
      if (a > b) {
        wins += 1.0;
      } else if (a == b) {
        wins += 0.5;
      }
    }
  }
  return wins / (static_cast<double>(positives.size()) * static_cast<double>(negatives.size()));
}

/// Ranks 1..n of distinct values.
inline std::vector<double> ranks_distinct(const std::vector<double>& row) {
  std::vector<double> ranks(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) {
    int below = 0;
    for (double v : row) below += v < row[i] ? 1 : 0;
    ranks[i] = below + 1;
  }
  return ranks;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks_distinct(a);
  const auto rb = ranks_distinct(b);
  const double n = static_cast<double>(a.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

/// Kendall's W from the mean pairwise Spearman correlation (valid without
/// ties): W = ((m - 1) * mean_rho + 1) / m.
inline double kendall_w_via_spearman(const std::vector<std::vector<double>>& rows) {
  const double m = static_cast<double>(rows.size());
  double sum = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      sum += spearman(rows[i], rows[j]);
      ++pairs;
    }
  }
  const double mean_rho = sum / pairs;
  return ((m - 1.0) * mean_rho + 1.0) / m;
}

}  // namespace oracle
