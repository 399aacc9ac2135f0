#include "lcc/data/mask.hpp"

#include <array>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace lcc::data {

namespace {

std::array<Rgb, kNumClasses> default_table() {
  std::array<Rgb, kNumClasses> t;
  for (int c = 0; c < kNumClasses; ++c) t[c] = class_color(c);
  return t;
}

int l1_distance(const std::uint8_t* px, const Rgb& color) {
  return std::abs(int(px[0]) - int(color[0])) + std::abs(int(px[1]) - int(color[1])) +
         std::abs(int(px[2]) - int(color[2]));
}

}  // namespace

MaskImage decode_mask(const ImageU8& rgb, ColorMatch mode, MaskDecodeStats* stats,
                      std::span<const Rgb> color_table) {
  const auto fallback = default_table();
  if (color_table.empty()) color_table = fallback;

  MaskImage mask(rgb.width, rgb.height);
  MaskDecodeStats local;
  for (int y = 0; y < rgb.height; ++y) {
    for (int x = 0; x < rgb.width; ++x) {
      const std::uint8_t* px = rgb.at(x, y);
      int exact = -1;
      for (std::size_t c = 0; c < color_table.size(); ++c) {
        if (px[0] == color_table[c][0] && px[1] == color_table[c][1] &&
            px[2] == color_table[c][2]) {
          exact = static_cast<int>(c);
          break;
        }
      }
      if (exact >= 0) {
        mask.at(x, y) = static_cast<std::uint8_t>(exact);
        continue;
      }
      if (mode == ColorMatch::Strict)
        throw std::invalid_argument("decode_mask: pixel (" + std::to_string(x) + "," +
                                    std::to_string(y) + ") color " + std::to_string(px[0]) + "," +
                                    std::to_string(px[1]) + "," + std::to_string(px[2]) +
                                    " is not in the class color table");
      int best = 0;
      int best_d = l1_distance(px, color_table[0]);
      for (std::size_t c = 1; c < color_table.size(); ++c) {
        const int d = l1_distance(px, color_table[c]);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      mask.at(x, y) = static_cast<std::uint8_t>(best);
      ++local.off_palette;
    }
  }
  if (stats) *stats = local;
  return mask;
}

ImageU8 encode_mask(const MaskImage& mask, std::span<const Rgb> color_table) {
  const auto fallback = default_table();
  if (color_table.empty()) color_table = fallback;
  ImageU8 out(mask.width, mask.height);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      const std::uint8_t c = mask.at(x, y);
      if (c >= color_table.size())
        throw std::invalid_argument("encode_mask: class index " + std::to_string(c) +
                                    " out of range");
      std::uint8_t* px = out.at(x, y);
      px[0] = color_table[c][0];
      px[1] = color_table[c][1];
      px[2] = color_table[c][2];
    }
  }
  return out;
}

ClassProportions compute_proportions(const MaskImage& mask) {
  std::array<std::size_t, kNumClasses> counts{};
  for (std::uint8_t c : mask.classes) {
    if (c >= kNumClasses)
      throw std::invalid_argument("compute_proportions: class index " + std::to_string(c) +
                                  " out of range");
    ++counts[c];
  }
  const double total = static_cast<double>(mask.classes.size());
  if (total == 0) throw std::invalid_argument("compute_proportions: empty mask");
  ClassProportions p;
  for (int c = 0; c < kNumClasses; ++c) p[c] = static_cast<double>(counts[c]) / total;
  return p;
}

std::vector<std::uint8_t> patch_majority_labels(const MaskImage& mask, int grid) {
  if (grid < 1) throw std::invalid_argument("patch_majority_labels: grid must be >= 1");
  if (mask.width % grid != 0 || mask.height % grid != 0)
    throw std::invalid_argument("patch_majority_labels: mask " + std::to_string(mask.width) + "x" +
                                std::to_string(mask.height) + " is not divisible by grid " +
                                std::to_string(grid));
  const int cw = mask.width / grid;
  const int ch = mask.height / grid;
  std::vector<std::uint8_t> labels;
  labels.reserve(static_cast<std::size_t>(grid) * grid);
  for (int gy = 0; gy < grid; ++gy) {
    for (int gx = 0; gx < grid; ++gx) {
      std::array<std::size_t, kNumClasses> counts{};
      for (int y = 0; y < ch; ++y)
        for (int x = 0; x < cw; ++x) ++counts[mask.at(gx * cw + x, gy * ch + y)];
      int best = 0;
      for (int c = 1; c < kNumClasses; ++c)
        if (counts[c] > counts[best]) best = c;  // strict: lowest index wins ties
      labels.push_back(static_cast<std::uint8_t>(best));
    }
  }
  return labels;
}

}  // namespace lcc::data
