#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lcc/data/bag.hpp"
#include "lcc/models/model.hpp"

namespace lcc::models {

/// Per-configuration training hyperparameters (learning rate, weight decay,
/// dropout).
struct TrainDefaults {
  double lr = 1e-4;
  double weight_decay = 1e-5;
  double dropout = 0.0;
};

/// All valid model configuration identifiers:
/// s2p-{small|medium|large}-{8|16|24}, unet-{224|448}, scene-baseline.
const std::vector<std::string>& known_config_ids();

bool is_known_config_id(const std::string& id);

TrainDefaults defaults_for(const std::string& config_id);

/// Builds a freshly initialized model for a configuration identifier.
/// `dropout_override`, when set, replaces the tabulated dropout rate.
std::unique_ptr<Model> build_model(const std::string& config_id, std::uint64_t seed,
                                   std::optional<double> dropout_override = {});

/// Writes every parameter plus the normalization statistics (entries
/// "norm.mean"/"norm.std") into one self-describing checkpoint.
void save_model(const std::filesystem::path& path, Model& model,
                const data::ChannelStats& stats);

struct LoadedModel {
  std::unique_ptr<Model> model;
  data::ChannelStats stats;
};

LoadedModel load_model(const std::filesystem::path& path);

}  // namespace lcc::models
