#include "lcc/metrics/miou.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lcc/data/image.hpp"

namespace lcc::metrics {

void ConfusionAccumulator::add(int truth, int pred, std::int64_t count) {
  if (truth < 0 || truth >= n_ || pred < 0 || pred >= n_)
    throw std::invalid_argument("confusion: class index out of range");
  counts_[static_cast<std::size_t>(truth) * n_ + pred] += count;
}

void ConfusionAccumulator::merge(const ConfusionAccumulator& other) {
  if (other.n_ != n_) throw std::invalid_argument("confusion: merging different class counts");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

std::int64_t ConfusionAccumulator::total() const {
  std::int64_t t = 0;
  for (std::int64_t c : counts_) t += c;
  return t;
}

IouResult miou(const ConfusionAccumulator& confusion) {
  if (confusion.total() == 0) throw std::invalid_argument("miou: no units scored");
  const int C = confusion.n_classes();
  IouResult result;
  result.per_class.assign(C, std::numeric_limits<double>::quiet_NaN());
  double sum = 0.0;
  int included = 0;
  for (int c = 0; c < C; ++c) {
    const std::int64_t tp = confusion.at(c, c);
    std::int64_t fp = 0, fn = 0;
    for (int o = 0; o < C; ++o) {
      if (o == c) continue;
      fp += confusion.at(o, c);
      fn += confusion.at(c, o);
    }
    const std::int64_t uni = tp + fp + fn;
    if (uni == 0) {
      ++result.classes_skipped;
      continue;
    }
    const double iou = static_cast<double>(tp) / static_cast<double>(uni);
    result.per_class[c] = iou;
    sum += iou;
    ++included;
  }
  result.miou = sum / included;
  return result;
}

std::vector<std::uint8_t> argmax_classes(const nd::Tensor& preds) {
  if (preds.rank() != 2)
    throw std::invalid_argument("argmax_classes: expected [k,C], got " +
                                nd::shape_str(preds.shape()));
  const std::size_t k = preds.dim(0), C = preds.dim(1);
  if (k < 1) throw std::invalid_argument("argmax_classes: empty predictions");
  std::vector<std::uint8_t> out(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double* row = preds.data() + j * C;
    std::size_t best = 0;
    for (std::size_t c = 1; c < C; ++c)
      if (row[c] > row[best]) best = c;  // strict: lowest index wins ties
    out[j] = static_cast<std::uint8_t>(best);
  }
  return out;
}

IouResult patch_miou(std::span<const PatchScene> scenes) {
  ConfusionAccumulator confusion;
  for (const PatchScene& s : scenes) {
    if (s.pred.size() != s.truth.size())
      throw std::invalid_argument("patch_miou: prediction/label length mismatch: " +
                                  std::to_string(s.pred.size()) + " vs " +
                                  std::to_string(s.truth.size()));
    for (std::size_t j = 0; j < s.pred.size(); ++j) confusion.add(s.truth[j], s.pred[j]);
  }
  return miou(confusion);
}

data::MaskImage tile_patch_classes(std::span<const std::uint8_t> patch_pred, int grid, int width,
                                   int height) {
  if (width % grid != 0 || height % grid != 0)
    throw std::invalid_argument("tile_patch_classes: dimensions not divisible by grid");
  if (patch_pred.size() != static_cast<std::size_t>(grid) * grid)
    throw std::invalid_argument("tile_patch_classes: expected " + std::to_string(grid * grid) +
                                " patch classes, got " + std::to_string(patch_pred.size()));
  data::MaskImage out(width, height);
  const int cw = width / grid, ch = height / grid;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      out.at(x, y) = patch_pred[static_cast<std::size_t>(y / ch) * grid + (x / cw)];
  return out;
}

void accumulate_pixel_confusion(std::span<const std::uint8_t> patch_pred, int grid,
                                const data::MaskImage& mask, ConfusionAccumulator& confusion,
                                bool ignore_unknown) {
  if (mask.width % grid != 0 || mask.height % grid != 0)
    throw std::invalid_argument("pixel_miou: mask " + std::to_string(mask.width) + "x" +
                                std::to_string(mask.height) + " not divisible by grid " +
                                std::to_string(grid));
  if (patch_pred.size() != static_cast<std::size_t>(grid) * grid)
    throw std::invalid_argument("pixel_miou: patch count does not match grid geometry");
  const int cw = mask.width / grid, ch = mask.height / grid;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      const int truth = mask.at(x, y);
      if (ignore_unknown && truth == data::kNumClasses - 1) continue;
      confusion.add(truth, patch_pred[static_cast<std::size_t>(y / ch) * grid + (x / cw)]);
    }
  }
}

IouResult pixel_miou(std::span<const PixelScene> scenes, bool ignore_unknown) {
  ConfusionAccumulator confusion;
  for (const PixelScene& s : scenes)
    accumulate_pixel_confusion(s.patch_pred, s.grid, *s.mask, confusion, ignore_unknown);
  return miou(confusion);
}

void accumulate_cam_confusion(const nd::Tensor& evidence_maps, const data::MaskImage& mask,
                              ConfusionAccumulator& confusion, bool ignore_unknown) {
  if (evidence_maps.rank() != 3)
    throw std::invalid_argument("cam_pixel_miou: expected [C,H,W] evidence maps, got " +
                                nd::shape_str(evidence_maps.shape()));
  const std::size_t C = evidence_maps.dim(0);
  const int H = static_cast<int>(evidence_maps.dim(1));
  const int W = static_cast<int>(evidence_maps.dim(2));

  // Resize each class plane to mask resolution, then per-pixel argmax.
  const std::size_t n = static_cast<std::size_t>(mask.width) * mask.height;
  std::vector<double> resized(C * n);
  for (std::size_t c = 0; c < C; ++c) {
    const double* src = evidence_maps.data() + c * static_cast<std::size_t>(H) * W;
    data::resize_bilinear_plane(src, W, H, resized.data() + c * n, mask.width, mask.height);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int truth = mask.classes[i];
    if (ignore_unknown && truth == data::kNumClasses - 1) continue;
    std::size_t best = 0;
    for (std::size_t c = 1; c < C; ++c)
      if (resized[c * n + i] > resized[best * n + i]) best = c;
    confusion.add(truth, static_cast<int>(best));
  }
}

IouResult cam_pixel_miou(const nd::Tensor& evidence_maps, const data::MaskImage& mask,
                         bool ignore_unknown) {
  ConfusionAccumulator confusion(
      static_cast<int>(evidence_maps.rank() == 3 ? evidence_maps.dim(0) : data::kNumClasses));
  accumulate_cam_confusion(evidence_maps, mask, confusion, ignore_unknown);
  return miou(confusion);
}

}  // namespace lcc::metrics
