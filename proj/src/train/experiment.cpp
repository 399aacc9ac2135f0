#include "lcc/train/experiment.hpp"

#include <stdexcept>

#include "lcc/data/png_io.hpp"
#include "lcc/metrics/miou.hpp"

namespace lcc::train {

std::vector<data::Bag> load_bags(const data::DatasetManifest& manifest,
                                 const std::vector<std::string>& scene_ids,
                                 const models::BagGeometry& geometry, bool with_patch_labels) {
  std::vector<data::Bag> bags;
  bags.reserve(scene_ids.size());
  for (const std::string& id : scene_ids) {
    const data::ManifestEntry& entry = manifest.find(id);
    data::ImageU8 scene = data::read_image(manifest.image_file(entry));
    data::MaskImage mask;
    const bool has_mask = with_patch_labels && !entry.mask_path.empty();
    if (has_mask) mask = data::decode_mask(data::read_image(manifest.mask_file(entry)));
    bags.push_back(data::make_bag(id, scene, geometry.grid_size, geometry.patch_px,
                                  manifest.stats, entry.label, has_mask ? &mask : nullptr));
  }
  return bags;
}

metrics::MetricsReport evaluate_model(models::Model& model,
                                      const data::DatasetManifest& manifest,
                                      const std::vector<std::string>& scene_ids,
                                      bool ignore_unknown) {
  metrics::MetricsReport report;
  report.config_id = model.config_id();

  const models::BagGeometry geom = model.geometry();
  double rmse_sum = 0.0, mae_sum = 0.0;
  metrics::ConfusionAccumulator patch_confusion;
  metrics::ConfusionAccumulator pixel_confusion;
  bool any_patch = false, any_pixel = false;

  for (const std::string& id : scene_ids) {
    const data::ManifestEntry& entry = manifest.find(id);
    data::ImageU8 scene = data::read_image(manifest.image_file(entry));
    data::MaskImage mask;
    const bool has_mask = !entry.mask_path.empty();
    if (has_mask) mask = data::decode_mask(data::read_image(manifest.mask_file(entry)));

    data::Bag bag = data::make_bag(id, scene, geom.grid_size, geom.patch_px, manifest.stats,
                                   entry.label, has_mask ? &mask : nullptr);
    models::PredictionBundle bundle = model.predict(bag, has_mask);

    double sq = 0.0, ab = 0.0;
    for (int c = 0; c < data::kNumClasses; ++c) {
      const double d = bundle.scene_pred[c] - bag.label[c];
      sq += d * d;
      ab += std::abs(d);
    }
    rmse_sum += std::sqrt(sq / data::kNumClasses);
    mae_sum += ab / data::kNumClasses;

    if (!bundle.patch_preds.empty() && has_mask) {
      const std::vector<std::uint8_t> pred = metrics::argmax_classes(bundle.patch_preds);
      for (std::size_t j = 0; j < pred.size(); ++j)
        patch_confusion.add(bag.patch_labels[j], pred[j]);
      any_patch = true;
      metrics::accumulate_pixel_confusion(pred, geom.grid_size, mask, pixel_confusion,
                                          ignore_unknown);
      any_pixel = true;
    } else if (!bundle.evidence_maps.empty() && has_mask) {
      // class-activation route: per-pixel argmax over the evidence maps
      metrics::accumulate_cam_confusion(bundle.evidence_maps, mask, pixel_confusion,
                                        ignore_unknown);
      any_pixel = true;
    }
  }

  const double n = static_cast<double>(scene_ids.size());
  if (scene_ids.empty()) throw std::invalid_argument("evaluate_model: empty scene set");
  report.scene_rmse = rmse_sum / n;
  report.scene_mae = mae_sum / n;
  if (any_patch) {
    const metrics::IouResult r = metrics::miou(patch_confusion);
    report.patch_miou = r.miou;
    report.per_class_iou = r.per_class;
    report.classes_skipped = r.classes_skipped;
  }
  if (any_pixel) report.pixel_miou = metrics::miou(pixel_confusion).miou;
  return report;
}

CvExperiment run_cv_experiment(const data::DatasetManifest& manifest,
                               const std::string& config_id, const TrainConfig& base_config,
                               int n_folds, int n_repeats,
                               std::optional<double> dropout_override) {
  if (n_repeats < 1) throw std::invalid_argument("run_cv_experiment: n_repeats must be >= 1");
  CvExperiment experiment;
  std::vector<metrics::MetricsReport> reports;

  for (int repeat = 0; repeat < n_repeats; ++repeat) {
    const std::uint64_t repeat_seed = base_config.seed + static_cast<std::uint64_t>(repeat);
    const auto folds = data::make_folds(manifest, n_folds, repeat_seed);
    for (const data::FoldSplit& fold : folds) {
      std::unique_ptr<models::Model> model = models::build_model(
          config_id, repeat_seed * 1000 + static_cast<std::uint64_t>(fold.fold_index),
          dropout_override);
      const models::BagGeometry geom = model->geometry();
      const std::vector<data::Bag> train_bags = load_bags(manifest, fold.train, geom, false);
      const std::vector<data::Bag> val_bags = load_bags(manifest, fold.validation, geom, false);

      TrainConfig cfg = base_config;
      cfg.seed = repeat_seed * 100 + static_cast<std::uint64_t>(fold.fold_index);
      TrainLog log = train_model(*model, train_bags, val_bags, cfg);

      metrics::MetricsReport report = evaluate_model(*model, manifest, fold.test);
      reports.push_back(report);
      experiment.runs.push_back({fold.fold_index, repeat, std::move(report), std::move(log)});
    }
  }
  experiment.aggregate = metrics::aggregate_reports(reports);
  return experiment;
}

}  // namespace lcc::train
