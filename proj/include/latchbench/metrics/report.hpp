#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "latchbench/core/jsonl.hpp"
#include "latchbench/judge/judge.hpp"
#include "latchbench/metrics/metrics.hpp"

namespace latchbench::metrics {

struct ReportConfig {
  std::string experiment_id;
  /// Strategy labels that must have verdicts.
  std::vector<std::string> strategies;
  std::string baseline = "vanilla";
};

/// One (model_pair, tier, strategy label) cell.
struct ReportRow {
  std::string model_pair;
  std::string tier;
  std::string strategy;  // label
  std::string kind;      // vanilla | ssrp | reflexion
  std::optional<std::string> granularity;
  std::size_t n = 0;  // verdicts counted in APA (judge errors excluded)
  std::size_t successes = 0;
  double apa = 0.0;
  std::optional<double> lift;
  std::string lift_note;  // "baseline", "n/a (baseline zero)", "no baseline"
  std::optional<PairedSignificance> significance;
  std::string significance_note;
  double refusal_rate = 0.0;
  std::optional<double> pi_rate;
  std::optional<double> grounding_gap;
  std::size_t judge_errors = 0;
  std::size_t backend_errors = 0;
  std::size_t parse_failures = 0;
};

struct NamedFit {
  std::string family;  // model pair, or "pooled"
  std::string strategy;
  std::vector<CurvePoint> points;
  std::optional<CurveFit> fit;
  std::string error;  // why no fit was possible
};

struct MetricsReport {
  std::string experiment_id;
  std::vector<ReportRow> rows;
  /// Per strategy label, pooled over model pairs and tiers.
  std::vector<ReportRow> strategy_totals;
  std::vector<NamedFit> curve_fits;
  std::size_t judge_errors = 0;
  std::size_t backend_errors = 0;
};

/// Throws DomainError naming a configured strategy without verdicts.
MetricsReport aggregate_report(const std::vector<judge::Verdict>& verdicts, const ReportConfig& config);

json to_json(const MetricsReport& r);

/// Header: model_pair,tier,strategy,apa,n,lift,t_p,mcnemar_p
std::string report_csv(const MetricsReport& r);

/// Header: x,apa,strategy (one row per family-pooled point)
std::string curve_points_csv(const MetricsReport& r);

/// Writes report.json, report.csv and curve_points.csv into `dir`.
void write_report(const MetricsReport& r, const std::filesystem::path& dir);

/// Human-readable summary table.
std::string format_report(const MetricsReport& r);

}  // namespace latchbench::metrics
