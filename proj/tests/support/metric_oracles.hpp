#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "htmlphish/metrics.hpp"
#include "htmlphish/rng.hpp"
#include "support/auc_oracle.hpp"

namespace htmlphish::testing {

// Textbook definitions, tallied straight from the score/label pairs.
struct OracleMetrics {
  double tp = 0, fp = 0, tn = 0, fn = 0;
  std::optional<double> accuracy, precision, tpr, fpr, f1;
};

inline OracleMetrics oracle_metrics(const std::vector<double>& scores,
                                    const std::vector<int>& labels, double threshold) {
  OracleMetrics m;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool flagged = !(scores[i] < threshold);
    m.tp += flagged && labels[i] == 1;
    m.fp += flagged && labels[i] == 0;
    m.tn += !flagged && labels[i] == 0;
    m.fn += !flagged && labels[i] == 1;
  }
  const double n = m.tp + m.fp + m.tn + m.fn;
  if (n > 0) m.accuracy = (m.tp + m.tn) / n;
  if (m.tp + m.fp > 0) m.precision = m.tp / (m.tp + m.fp);
  if (m.tp + m.fn > 0) m.tpr = m.tp / (m.tp + m.fn);
  if (m.fp + m.tn > 0) m.fpr = m.fp / (m.fp + m.tn);
  if (m.tp > 0) m.f1 = 2 * m.tp / (2 * m.tp + m.fp + m.fn);
  return m;
}

inline bool same_ratio(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || std::abs(*a - *b) <= 1e-12;
}

struct SweepResult {
  std::size_t fixtures = 0;
  std::size_t mismatches = 0;
};

// Every label pattern and every score pattern over a three-value grid, for
// lengths 1 through max_length, at several thresholds.
inline SweepResult exhaustive_metric_sweep(std::size_t max_length = 6) {
  const double grid[] = {0.25, 0.5, 0.75};
  const double thresholds[] = {0.0, 0.25, 0.5, 0.6, 0.75, 1.0};
  SweepResult result;
  for (std::size_t len = 1; len <= max_length; ++len) {
    std::size_t score_patterns = 1;
    for (std::size_t i = 0; i < len; ++i) score_patterns *= 3;
    for (std::size_t lp = 0; lp < (std::size_t{1} << len); ++lp) {
      std::vector<int> labels(len);
      for (std::size_t i = 0; i < len; ++i) labels[i] = static_cast<int>((lp >> i) & 1U);
      for (std::size_t sp = 0; sp < score_patterns; ++sp) {
        std::vector<double> scores(len);
        for (std::size_t i = 0, code = sp; i < len; ++i, code /= 3) scores[i] = grid[code % 3];
        for (double t : thresholds) {
          ++result.fixtures;
          const auto counts = metrics::confusion(scores, labels, t);
          const auto got = metrics::threshold_metrics(counts);
          const auto want = oracle_metrics(scores, labels, t);
          const bool ok = counts.tp == want.tp && counts.fp == want.fp && counts.tn == want.tn &&
                          counts.fn == want.fn && same_ratio(got.accuracy, want.accuracy) &&
                          same_ratio(got.precision, want.precision) &&
                          same_ratio(got.tpr, want.tpr) && same_ratio(got.fpr, want.fpr) &&
                          same_ratio(got.f1, want.f1);
          if (!ok) ++result.mismatches;
        }
      }
    }
  }
  return result;
}

// Random fixtures of size 2..max_size with both classes present. Scores are
// drawn from a coarse grid every other fixture so ties are common.
struct AucSweep {
  std::size_t fixtures = 0;
  std::size_t tied_fixtures = 0;
  double max_error = 0.0;
};

inline AucSweep random_auc_sweep(std::size_t count, std::uint64_t seed,
                                 std::size_t max_size = 50) {
  nn::Rng rng(seed);
  AucSweep sweep;
  while (sweep.fixtures < count) {
    const std::size_t n = 2 + rng.below(max_size - 1);
    const bool coarse = sweep.fixtures % 2 == 1;
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = coarse ? static_cast<double>(rng.below(5)) / 4.0 : rng.uniform();
      labels[i] = static_cast<int>(rng.below(2));
    }
    const auto positives = std::count(labels.begin(), labels.end(), 1);
    if (positives == 0 || positives == static_cast<long>(n)) continue;
    auto sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) ++sweep.tied_fixtures;
    const double got = metrics::roc_auc(scores, labels).auc;
    sweep.max_error = std::max(sweep.max_error, std::abs(got - pairwise_auc(scores, labels)));
    ++sweep.fixtures;
  }
  return sweep;
}

}  // namespace htmlphish::testing
