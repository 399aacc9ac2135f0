#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lcc/metrics/miou.hpp"

namespace lcc::metrics {

/// Evaluation summary for one model on one evaluation set.
struct MetricsReport {
  std::string config_id;
  double scene_rmse = 0.0;
  double scene_mae = 0.0;
  std::optional<double> patch_miou;  // absent for scene-only models
  std::optional<double> pixel_miou;  // absent without masks
  std::vector<double> per_class_iou;
  int classes_skipped = 0;
};

void write_report_csv(const std::filesystem::path& path, const MetricsReport& report);
MetricsReport read_report_csv(const std::filesystem::path& path);
std::string format_report_text(const MetricsReport& report);

/// One aggregate row: mean and standard error per metric over fold/repeat
/// results, shaped like the headline results table.
struct AggregateRow {
  std::string config_id;
  int n_runs = 0;
  double rmse_mean = 0, rmse_se = 0;
  double mae_mean = 0, mae_se = 0;
  std::optional<double> patch_mean, patch_se;
  std::optional<double> pixel_mean, pixel_se;
};

std::vector<AggregateRow> aggregate_reports(const std::vector<MetricsReport>& reports);
void write_aggregate_csv(const std::filesystem::path& path,
                         const std::vector<AggregateRow>& rows);
std::string format_aggregate_table(const std::vector<AggregateRow>& rows);

/// Sample standard error: stddev(n-1-normalized) / sqrt(n); 0 for n < 2.
double standard_error(const std::vector<double>& values);
double mean_of(const std::vector<double>& values);

}  // namespace lcc::metrics
