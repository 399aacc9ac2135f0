#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lcc/data/image.hpp"
#include "lcc/data/mask.hpp"
#include "lcc/data/proportions.hpp"
#include "lcc/nd/tensor.hpp"

namespace lcc::data {

struct ChannelStats {
  std::array<double, 3> mean{};
  std::array<double, 3> stddev{1.0, 1.0, 1.0};
};

/// DeepGlobe per-channel normalization constants.
inline constexpr std::array<double, 3> kDeepGlobeMean = {0.4082, 0.3791, 0.2816};
inline constexpr std::array<double, 3> kDeepGlobeStd = {0.06722, 0.04668, 0.04768};

inline ChannelStats deepglobe_stats() { return {kDeepGlobeMean, kDeepGlobeStd}; }

/// One MIL bag: the ordered patches of one scene plus its proportion label.
/// Patch j corresponds to grid cell (j / grid_cols, j % grid_cols).
struct Bag {
  std::string scene_id;
  std::vector<nd::Tensor> patches;  // each [3,P,P], normalized
  int grid_rows = 0;
  int grid_cols = 0;
  ClassProportions label;
  std::vector<std::uint8_t> patch_labels;  // cell-majority classes; evaluation only, may be empty

  std::size_t size() const { return patches.size(); }
};

/// (pixel/255 - mean[c]) / std[c] per channel; interleaved image to planar
/// [3,P,P] tensor.
nd::Tensor normalize_patch(const ImageF& patch, const ChannelStats& stats);

/// Grid tiling: splits the scene into grid^2 cells (row-major) and resamples
/// each to patch_px x patch_px. Scene dimensions must be divisible by grid.
std::vector<ImageF> extract_patches(const ImageU8& scene, int grid, int patch_px);

/// Full bag construction. grid == 1 resamples the whole scene to one patch.
Bag make_bag(const std::string& scene_id, const ImageU8& scene, int grid, int patch_px,
             const ChannelStats& stats, const ClassProportions& label,
             const MaskImage* mask = nullptr);

/// Stacks a bag's patches into one [k,3,P,P] tensor.
nd::Tensor stack_patches(const Bag& bag);

}  // namespace lcc::data
