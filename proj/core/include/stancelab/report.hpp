#pragma once

#include <string>
#include <vector>

#include "stancelab/experiments.hpp"
#include "stancelab/space.hpp"
#include "stancelab/store.hpp"
#include "stancelab/survey.hpp"

namespace stancelab {

// Machine method id -> display label used in tables and legends.
std::string method_display_name(const std::string& method);

// Published scores shipped alongside the repo for side-by-side columns.
// These are never recomputed; they render as reference rows only.
struct ReferenceScore {
  std::string model;
  std::string method;
  std::string dataset;
  std::string metric;  // "macro_f1" | "accuracy"
  double mean = 0.0;
  double std = 0.0;
};

std::vector<ReferenceScore> load_reference_scores(const std::string& path);

struct ReportFiles {
  std::vector<std::string> paths;
};

// Score tables: mean +- sample std over 8 run-level means per (dataset,
// method) cell; missing cells are emitted as empty fields, never dropped.
ReportFiles report_table3(const std::vector<ResultRow>& rows,
                          const std::vector<ReferenceScore>& reference,
                          const std::string& out_dir);
ReportFiles report_table4(const std::vector<ResultRow>& rows,
                          const std::vector<ReferenceScore>& reference,
                          const std::string& out_dir);

// One-tailed Welch tests (sft+grpo > baseline) on run-level means plus
// Cohen's d, with three-tier significance metadata per cell:
// "bonferroni" | "uncorrected" | "none".
ReportFiles report_table8(const std::vector<ResultRow>& rows, const std::string& out_dir);

struct RegressionPoint {
  std::string unit_id;
  double neutral_base_rate = 0.0;
  double macro_f1 = 0.0;  // per-unit mean over runs, 0..1 scale
  double accuracy = 0.0;
};

// Per-unit mean scores for one (dataset, scheme, method) slice of the store.
std::vector<RegressionPoint> regression_points(const std::vector<ResultRow>& rows,
                                               const std::string& dataset,
                                               const std::string& scheme,
                                               const std::string& method);

std::vector<RegressionPoint> load_regression_points(const std::string& path);

// Score-vs-neutral-rate regression table: both metrics, full field set
// (n, intercept, slope, se, ci95, r, r^2, p, rmse).
ReportFiles report_table11(const std::vector<RegressionPoint>& points,
                           const std::string& out_dir);

// Political-space coordinates; kind is "population" | "human" | "agent" |
// "inverted". Human/agent pairs share unit_id and get connecting segments.
struct SpacePointRecord {
  std::string unit_id;
  std::string kind;
  double x = 0.0;
  double y = 0.0;
  std::string group;
};

void save_space_points(const std::vector<SpacePointRecord>& points, const std::string& path);
std::vector<SpacePointRecord> load_space_points(const std::string& path);

ReportFiles report_fig2(const std::vector<SpacePointRecord>& points,
                        const std::string& out_dir);

// Mean macro-F1 per group x method with across-unit std error bars.
ReportFiles report_fig3(const std::vector<ResultRow>& rows, const Dataset& dataset,
                        const std::string& out_dir);

// Neutral-class diagnostics on one slice: recall-by-class bars plus the
// F1-vs-neutral-base-rate scatter with the fitted line.
ReportFiles report_fig4(const std::vector<ResultRow>& rows, const std::string& dataset,
                        const std::string& scheme, const std::string& method,
                        const std::string& out_dir);

ReportFiles report_fig5(const BiasReport& report, const std::string& out_dir);
ReportFiles report_fig6(const BiasReport& report, const std::string& out_dir);
ReportFiles report_fig7(const std::vector<InversionRow>& rows, const std::string& out_dir);

// Serializable subset of a recoding-comparison outcome for later rendering.
struct SchemeSummary {
  std::string scheme;
  std::vector<Stance> labels;
  std::vector<std::vector<long>> confusion;  // [truth][pred], last col unresolved
  RegressionResult regression;
  ScoreAggregate aggregate;
};

SchemeSummary scheme_summary(const SchemeOutcome& outcome);
void save_scheme_summaries(const std::vector<SchemeSummary>& summaries,
                           const std::string& path);
std::vector<SchemeSummary> load_scheme_summaries(const std::string& path);

ReportFiles report_fig10(const std::vector<SchemeSummary>& summaries,
                         const std::string& out_dir);

ReportFiles report_fig11(const std::vector<TrainsizeRow>& rows, const std::string& out_dir);

// Round-trips so `experiment` runs persist results the `report` verb renders.
void save_bias_report(const BiasReport& report, const std::string& path);
BiasReport load_bias_report(const std::string& path);
void save_inversion_rows(const std::vector<InversionRow>& rows, const std::string& path);
std::vector<InversionRow> load_inversion_rows(const std::string& path);
void save_trainsize_rows(const std::vector<TrainsizeRow>& rows, const std::string& path);
std::vector<TrainsizeRow> load_trainsize_rows(const std::string& path);
void save_regression_points(const std::vector<RegressionPoint>& points,
                            const std::string& path);

}  // namespace stancelab
