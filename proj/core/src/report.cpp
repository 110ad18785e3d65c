#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "htmlphish/metrics.hpp"

namespace htmlphish::metrics {
namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

// Up to two decimals with trailing zeros removed: 6.75, 3.5, 10.
std::string compact(double v) {
  std::string s = fixed(v, 2);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

std::string cell(const std::optional<double>& v) { return v ? fixed(*v, 2) : "n/a"; }

}  // namespace

std::string to_json(const EvalReport& r, int indent) {
  nlohmann::json points = nlohmann::json::array();
  if (r.roc) {
    for (const auto& p : r.roc->points) points.push_back({p.fpr, p.tpr});
  }
  nlohmann::json j = {
      {"documents", r.documents},
      {"threshold", r.threshold},
      {"counts", {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"tn", r.counts.tn}, {"fn", r.counts.fn}}},
      {"accuracy", optional_number(r.metrics.accuracy)},
      {"precision", optional_number(r.metrics.precision)},
      {"tpr", optional_number(r.metrics.tpr)},
      {"fpr", optional_number(r.metrics.fpr)},
      {"f1", optional_number(r.metrics.f1)},
      {"auc", r.roc ? nlohmann::json(r.roc->auc) : nlohmann::json(nullptr)},
      {"roc_points", points},
      {"timing",
       {{"total_seconds", r.timing.total_seconds},
        {"per_document_seconds", r.timing.per_document_seconds}}},
  };
  return j.dump(indent);
}

void write_roc_csv(const RocCurve& roc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw MetricsError("cannot write " + path.string());
  out << "fpr,tpr\n";
  char buf[64];
  for (const auto& p : roc.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.fpr, p.tpr);
    out << buf;
  }
  if (!out) throw MetricsError("cannot write " + path.string());
}

std::string format_duration(double seconds) {
  if (seconds >= 60.0) return compact(seconds / 60.0) + " mins";
  return compact(seconds) + " seconds";
}

std::string render_comparison_row(const ComparisonRow& row) {
  std::ostringstream out;
  out << "| " << row.model << " | " << cell(row.accuracy) << " | " << cell(row.precision) << " | "
      << cell(row.tpr) << " | " << cell(row.f1) << " | " << cell(row.auc) << " | " << row.time
      << " |";
  return out.str();
}

std::string render_comparison_table(std::span<const ComparisonRow> rows,
                                    const std::string& time_header) {
  std::ostringstream out;
  out << "| Models | Accuracy | Precision | True Positive Rates | F-1 Score | AUC | " << time_header
      << " |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (const auto& row : rows) out << render_comparison_row(row) << '\n';
  return out.str();
}

}  // namespace htmlphish::metrics
