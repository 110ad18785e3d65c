#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

namespace htmlphish::testing {

// Mann-Whitney statistic: the share of (positive, negative) pairs in which
// the positive scores higher, counting ties as one half.
inline double pairwise_auc(std::span<const double> scores, std::span<const int> labels) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  if (pairs == 0) throw std::invalid_argument("pairwise_auc needs both classes");
  return wins / static_cast<double>(pairs);
}

}  // namespace htmlphish::testing
