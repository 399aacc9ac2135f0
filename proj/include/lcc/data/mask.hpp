#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lcc/data/classes.hpp"
#include "lcc/data/image.hpp"
#include "lcc/data/proportions.hpp"

namespace lcc::data {

/// Per-pixel class indices (0..6), same dimensions as the scene it annotates.
struct MaskImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> classes;

  MaskImage() = default;
  MaskImage(int w, int h) : width(w), height(h), classes(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t& at(int x, int y) { return classes[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return classes[static_cast<std::size_t>(y) * width + x]; }
};

enum class ColorMatch {
  Strict,   // off-palette pixel is an error
  Nearest,  // off-palette pixel maps to the L1-nearest table color, counted
};

struct MaskDecodeStats {
  std::size_t off_palette = 0;
};

/// RGB mask -> class indices via the color table. Scanned masks carry
/// antialiasing artifacts, so Nearest mode resolves off-palette pixels by L1
/// distance (lowest class index on ties) and counts them.
MaskImage decode_mask(const ImageU8& rgb, ColorMatch mode = ColorMatch::Nearest,
                      MaskDecodeStats* stats = nullptr,
                      std::span<const Rgb> color_table = {});

ImageU8 encode_mask(const MaskImage& mask, std::span<const Rgb> color_table = {});

/// values[c] = pixels of class c / total pixels.
ClassProportions compute_proportions(const MaskImage& mask);

/// Majority class per grid cell, row-major; ties break to the lowest index.
std::vector<std::uint8_t> patch_majority_labels(const MaskImage& mask, int grid);

}  // namespace lcc::data
