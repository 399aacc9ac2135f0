#include "lcc/data/bag.hpp"

#include <algorithm>
#include <stdexcept>

namespace lcc::data {

nd::Tensor normalize_patch(const ImageF& patch, const ChannelStats& stats) {
  const std::size_t P_w = static_cast<std::size_t>(patch.width);
  const std::size_t P_h = static_cast<std::size_t>(patch.height);
  nd::Tensor t(nd::Shape{3, P_h, P_w});
  for (int c = 0; c < 3; ++c) {
    const double mean = stats.mean[c];
    const double inv_sd = 1.0 / stats.stddev[c];
    double* plane = t.data() + static_cast<std::size_t>(c) * P_h * P_w;
    for (std::size_t y = 0; y < P_h; ++y)
      for (std::size_t x = 0; x < P_w; ++x)
        plane[y * P_w + x] = (patch.pixels[3 * (y * P_w + x) + c] / 255.0 - mean) * inv_sd;
  }
  return t;
}

std::vector<ImageF> extract_patches(const ImageU8& scene, int grid, int patch_px) {
  if (patch_px < 1) throw std::invalid_argument("extract_patches: patch size must be >= 1");
  std::vector<ImageU8> cells = split_cells(scene, grid);
  std::vector<ImageF> patches;
  patches.reserve(cells.size());
  for (const ImageU8& cell : cells)
    patches.push_back(resize_bilinear(to_float(cell), patch_px, patch_px));
  return patches;
}

Bag make_bag(const std::string& scene_id, const ImageU8& scene, int grid, int patch_px,
             const ChannelStats& stats, const ClassProportions& label, const MaskImage* mask) {
  Bag bag;
  bag.scene_id = scene_id;
  bag.grid_rows = grid;
  bag.grid_cols = grid;
  bag.label = label;
  std::vector<ImageF> patches = extract_patches(scene, grid, patch_px);
  bag.patches.reserve(patches.size());
  for (const ImageF& p : patches) bag.patches.push_back(normalize_patch(p, stats));
  if (mask) {
    if (mask->width != scene.width || mask->height != scene.height)
      throw std::invalid_argument("make_bag: mask dimensions do not match scene for " + scene_id);
    bag.patch_labels = patch_majority_labels(*mask, grid);
  }
  return bag;
}

nd::Tensor stack_patches(const Bag& bag) {
  if (bag.patches.empty()) throw std::invalid_argument("stack_patches: empty bag");
  const nd::Shape& ps = bag.patches.front().shape();
  nd::Tensor out(nd::Shape{bag.patches.size(), ps[0], ps[1], ps[2]});
  const std::size_t stride = nd::shape_numel(ps);
  for (std::size_t j = 0; j < bag.patches.size(); ++j) {
    if (bag.patches[j].shape() != ps)
      throw std::invalid_argument("stack_patches: inconsistent patch shapes in bag " +
                                  bag.scene_id);
    std::copy_n(bag.patches[j].data(), stride, out.data() + j * stride);
  }
  return out;
}

}  // namespace lcc::data
