#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lcc/data/bag.hpp"
#include "lcc/models/model.hpp"
#include "lcc/nd/adam.hpp"

namespace lcc::train {

struct TrainConfig {
  double lr = 1e-4;
  double weight_decay = 0.0;
  int patience = 5;
  int max_epochs = 30;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_rmse = 0.0;
  double seconds = 0.0;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;  // 1-based; earliest epoch achieving the minimum validation RMSE
  double best_val_rmse = 0.0;
  std::string stop_reason;  // "patience" or "max-epochs"
};

void write_train_log_csv(const std::filesystem::path& path, const TrainLog& log);

struct SceneMetrics {
  double rmse = 0.0;
  double mae = 0.0;
};

/// Mean over bags of per-bag scene RMSE / per-class MAE, in evaluation mode.
SceneMetrics evaluate_scene(models::Model& model, std::span<const data::Bag> bags);

/// Validation metric seam: defaults to scene RMSE, replaceable in tests.
using ValidationFn = std::function<double(models::Model&, std::span<const data::Bag>)>;

/// Optimizes scene-level RMSE: one bag per Adam step, bags reshuffled every
/// epoch. Stops when validation RMSE has not strictly improved for
/// `patience` consecutive epochs, or after max_epochs; either way the model
/// is reset to its best-validation weights.
TrainLog train_model(models::Model& model, std::span<const data::Bag> train_bags,
                     std::span<const data::Bag> val_bags, const TrainConfig& config,
                     const ValidationFn& validation = {});

}  // namespace lcc::train
