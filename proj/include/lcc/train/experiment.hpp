#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lcc/data/folds.hpp"
#include "lcc/data/manifest.hpp"
#include "lcc/metrics/report.hpp"
#include "lcc/models/registry.hpp"
#include "lcc/train/trainer.hpp"

namespace lcc::train {

/// Loads bags for the given scene ids at one model geometry. Masks are
/// decoded (nearest-color) when present and requested, filling the bags'
/// patch-majority labels.
std::vector<data::Bag> load_bags(const data::DatasetManifest& manifest,
                                 const std::vector<std::string>& scene_ids,
                                 const models::BagGeometry& geometry, bool with_patch_labels);

/// Full four-metric evaluation of a model on the given scenes. Pixel mIoU
/// requires masks; scene-only models report scene metrics only.
metrics::MetricsReport evaluate_model(models::Model& model,
                                      const data::DatasetManifest& manifest,
                                      const std::vector<std::string>& scene_ids,
                                      bool ignore_unknown = false);

struct CvResult {
  int fold = 0;
  int repeat = 0;
  metrics::MetricsReport report;
  TrainLog log;
};

struct CvExperiment {
  std::vector<CvResult> runs;
  std::vector<metrics::AggregateRow> aggregate;  // single row (one configuration)
};

/// Cross-validation harness: for every repeat, folds are rebuilt with a
/// distinct seed, one model is trained per fold, and all four metrics are
/// evaluated on that fold's test scenes.
CvExperiment run_cv_experiment(const data::DatasetManifest& manifest,
                               const std::string& config_id, const TrainConfig& base_config,
                               int n_folds, int n_repeats,
                               std::optional<double> dropout_override = {});

}  // namespace lcc::train
