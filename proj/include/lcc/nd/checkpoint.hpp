#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lcc/nd/tensor.hpp"

namespace lcc::nd {

/// Self-describing binary container for named tensors. Little-endian
/// throughout; holds a format version and the model configuration identifier.
struct Checkpoint {
  std::uint32_t format_version = 1;
  std::string config_id;
  std::map<std::string, Tensor> entries;
};

void save_checkpoint(const std::filesystem::path& path, const std::string& config_id,
                     const std::vector<std::pair<std::string, const Tensor*>>& entries);

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace lcc::nd
