#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "lcc/data/mask.hpp"
#include "lcc/nd/tensor.hpp"

namespace lcc::metrics {

/// C x C confusion counts; entry (t, p) counts units with true class t
/// predicted as p. Mergeable: partial accumulators sum elementwise.
class ConfusionAccumulator {
 public:
  explicit ConfusionAccumulator(int n_classes = data::kNumClasses)
      : n_(n_classes), counts_(static_cast<std::size_t>(n_classes) * n_classes, 0) {}

  void add(int truth, int pred, std::int64_t count = 1);
  void merge(const ConfusionAccumulator& other);

  std::int64_t at(int truth, int pred) const {
    return counts_[static_cast<std::size_t>(truth) * n_ + pred];
  }
  std::int64_t total() const;
  int n_classes() const { return n_; }

 private:
  int n_;
  std::vector<std::int64_t> counts_;
};

struct IouResult {
  double miou = 0.0;
  std::vector<double> per_class;  // NaN for classes absent from truth and prediction
  int classes_skipped = 0;
};

/// IoU_c = TP / (TP + FP + FN); classes with an empty union are excluded
/// from the mean. Throws if nothing was scored.
IouResult miou(const ConfusionAccumulator& confusion);

/// Row-wise argmax over raw outputs [k,C]; ties go to the lowest index.
std::vector<std::uint8_t> argmax_classes(const nd::Tensor& preds);

/// Dataset-level patch mIoU: confusion accumulated over all patches of all
/// scenes, then miou.
struct PatchScene {
  std::vector<std::uint8_t> pred;   // per-patch predicted class
  std::vector<std::uint8_t> truth;  // per-patch majority label
};
IouResult patch_miou(std::span<const PatchScene> scenes);

/// Adds one scene's patch predictions tiled over their cell footprints at
/// mask resolution into `confusion` (block upsampling, no smoothing).
void accumulate_pixel_confusion(std::span<const std::uint8_t> patch_pred, int grid,
                                const data::MaskImage& mask, ConfusionAccumulator& confusion,
                                bool ignore_unknown = false);

struct PixelScene {
  std::vector<std::uint8_t> patch_pred;
  int grid = 0;
  const data::MaskImage* mask = nullptr;
};
IouResult pixel_miou(std::span<const PixelScene> scenes, bool ignore_unknown = false);

/// Adds one scene's per-pixel argmax over [C,H,W] evidence maps (bilinearly
/// resized to the mask resolution first) into `confusion`.
void accumulate_cam_confusion(const nd::Tensor& evidence_maps, const data::MaskImage& mask,
                              ConfusionAccumulator& confusion, bool ignore_unknown = false);

/// Per-pixel argmax over [C,H,W] evidence maps (bilinearly resized to the
/// mask resolution first), then mIoU against the mask.
IouResult cam_pixel_miou(const nd::Tensor& evidence_maps, const data::MaskImage& mask,
                         bool ignore_unknown = false);

/// Tiles per-patch classes into a full-resolution mask (block upsampling).
data::MaskImage tile_patch_classes(std::span<const std::uint8_t> patch_pred, int grid, int width,
                                   int height);

}  // namespace lcc::metrics
