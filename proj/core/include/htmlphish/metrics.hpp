#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "htmlphish/error.hpp"

namespace htmlphish::metrics {

// Label 1 (phishing) is the positive class.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// A document is predicted phishing iff score >= threshold.
// Throws MetricsError on length mismatch or labels outside {0, 1}.
ConfusionCounts confusion(std::span<const double> scores, std::span<const int> labels,
                          double threshold = 0.5);

// Ratios whose denominator is zero are left empty.
struct ThresholdMetrics {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> tpr;
  std::optional<double> fpr;
  std::optional<double> f1;
};

ThresholdMetrics threshold_metrics(const ConfusionCounts& counts);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) first, (1,1) last
  double auc = 0.0;
};

// Trapezoidal area under a polyline of ROC points.
double trapezoid_auc(std::span<const RocPoint> points);

// One point per distinct score (descending thresholds) plus (0,0). Ties are
// handled as a single threshold, so the area equals the Mann-Whitney
// statistic with ties counted as one half.
// Throws MetricsError unless both classes are present.
RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels);

struct Timing {
  double total_seconds = 0.0;
  double per_document_seconds = 0.0;
};

struct EvalReport {
  std::size_t documents = 0;
  double threshold = 0.5;
  ConfusionCounts counts;
  ThresholdMetrics metrics;
  std::optional<RocCurve> roc;  // absent when only one class is present
  Timing timing;
};

EvalReport evaluate(std::span<const double> scores, std::span<const int> labels,
                    double threshold = 0.5);

// Report JSON. Timing lives under its own "timing" key so it can be
// excluded when comparing runs.
std::string to_json(const EvalReport& report, int indent = 2);
void write_roc_csv(const RocCurve& roc, const std::filesystem::path& path);

// Formats a duration the way the comparison tables do: "9 seconds",
// "3.5 mins".
std::string format_duration(double seconds);

struct ComparisonRow {
  std::string model;
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> tpr;
  std::optional<double> f1;
  std::optional<double> auc;
  std::string time;
};

// Markdown table with the columns
// Models | Accuracy | Precision | True Positive Rates | F-1 Score | AUC | <time_header>
std::string render_comparison_table(std::span<const ComparisonRow> rows,
                                    const std::string& time_header = "Training time");
std::string render_comparison_row(const ComparisonRow& row);

}  // namespace htmlphish::metrics
