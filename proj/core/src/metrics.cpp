#include "htmlphish/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace htmlphish::metrics {
namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw MetricsError("scores and labels differ in length (" + std::to_string(scores.size()) +
                       " vs " + std::to_string(labels.size()) + ")");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw MetricsError("labels must be 0 or 1");
  }
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionCounts confusion(std::span<const double> scores, std::span<const int> labels,
                          double threshold) {
  check_inputs(scores, labels);
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1) {
      (predicted ? c.tp : c.fn)++;
    } else {
      (predicted ? c.fp : c.tn)++;
    }
  }
  return c;
}

ThresholdMetrics threshold_metrics(const ConfusionCounts& c) {
  ThresholdMetrics m;
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.tpr = ratio(c.tp, c.tp + c.fn);
  m.fpr = ratio(c.fp, c.tn + c.fp);
  if (m.precision && m.tpr && *m.precision + *m.tpr > 0.0) {
    m.f1 = 2.0 * *m.precision * *m.tpr / (*m.precision + *m.tpr);
  }
  return m;
}

double trapezoid_auc(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) / 2.0;
  }
  return area;
}

RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw MetricsError("ROC needs both classes (got " + std::to_string(positives) +
                       " positives, " + std::to_string(negatives) + " negatives)");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve roc;
  roc.points.push_back({0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == threshold; ++i) {
      (labels[order[i]] == 1 ? tp : fp)++;
    }
    roc.points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                          static_cast<double>(tp) / static_cast<double>(positives)});
  }
  roc.auc = trapezoid_auc(roc.points);
  return roc;
}

EvalReport evaluate(std::span<const double> scores, std::span<const int> labels,
                    double threshold) {
  EvalReport r;
  r.documents = scores.size();
  r.threshold = threshold;
  r.counts = confusion(scores, labels, threshold);
  r.metrics = threshold_metrics(r.counts);
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives > 0 && positives < labels.size()) r.roc = roc_auc(scores, labels);
  return r;
}

}  // namespace htmlphish::metrics
