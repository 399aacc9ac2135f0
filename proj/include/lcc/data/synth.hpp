#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "lcc/data/manifest.hpp"
#include "lcc/data/mask.hpp"

namespace lcc::data {

/// Parameters for the synthetic rectangle-region generator, the desk-scale
/// stand-in dataset. Base colors are far apart relative to the noise so the
/// classes are separable by color.
struct SynthParams {
  int n_scenes = 10;
  int scene_size = 48;  // must be divisible by 8, 16 and 24
  std::uint64_t seed = 0;
  int min_regions = 2;
  int max_regions = 5;
  double noise_sigma = 6.0;                     // per-pixel gaussian, 8-bit scale
  std::vector<int> active_classes = {0, 1, 3, 4};  // urban, agriculture, forest, water
};

struct SynthScene {
  std::string id;
  ImageU8 image;
  MaskImage mask;
  ClassProportions label;
};

/// Characteristic surface colors used to draw each class in synthetic scenes
/// (distinct from the mask coding).
inline constexpr std::array<Rgb, kNumClasses> kSynthBaseColors = {{
    {128, 126, 132},  // urban: concrete gray
    {214, 200, 96},   // agriculture: dry crop yellow
    {150, 232, 160},  // rangeland: pale green
    {24, 104, 40},    // forest: dark green
    {36, 60, 192},    // water: blue
    {208, 182, 150},  // barren: sand
    {12, 12, 12},     // unknown: near black
}};

std::vector<SynthScene> synth_generate(const SynthParams& params);

/// Generates and writes images/, masks/ and manifest.csv (+ stats sidecar)
/// under out_dir. Channel statistics are computed from the generated images.
DatasetManifest synth_write(const SynthParams& params, const std::filesystem::path& out_dir);

}  // namespace lcc::data
