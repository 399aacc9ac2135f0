#include "lcc/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lcc/data/png_io.hpp"
#include "lcc/nd/rng.hpp"

namespace lcc::data {

namespace {

void paint_region(ImageU8& img, MaskImage& mask, int x0, int y0, int x1, int y1, int cls,
                  double sigma, nd::Rng& rng) {
  const Rgb base = kSynthBaseColors[cls];
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      std::uint8_t* px = img.at(x, y);
      for (int c = 0; c < 3; ++c) {
        const double v = base[c] + (sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0);
        px[c] = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
      }
      mask.at(x, y) = static_cast<std::uint8_t>(cls);
    }
  }
}

}  // namespace

std::vector<SynthScene> synth_generate(const SynthParams& params) {
  if (params.scene_size % 8 != 0 || params.scene_size % 16 != 0 || params.scene_size % 24 != 0)
    throw std::invalid_argument("synth_generate: scene size " +
                                std::to_string(params.scene_size) +
                                " must be divisible by 8, 16 and 24");
  if (params.active_classes.empty())
    throw std::invalid_argument("synth_generate: no active classes");
  for (int c : params.active_classes)
    if (c < 0 || c >= kNumClasses)
      throw std::invalid_argument("synth_generate: class index out of range");
  if (params.min_regions < 0 || params.max_regions < params.min_regions)
    throw std::invalid_argument("synth_generate: bad region count range");

  nd::Rng rng(params.seed);
  const int S = params.scene_size;
  std::vector<SynthScene> scenes;
  scenes.reserve(params.n_scenes);

  for (int i = 0; i < params.n_scenes; ++i) {
    SynthScene scene;
    scene.id = "synth_" + std::to_string(i);
    scene.image = ImageU8(S, S);
    scene.mask = MaskImage(S, S);

    auto pick_class = [&]() {
      return params.active_classes[rng.below(params.active_classes.size())];
    };

    // Background fills the scene, then a few rectangles overlay it.
    paint_region(scene.image, scene.mask, 0, 0, S, S, pick_class(), params.noise_sigma, rng);
    const int n_regions =
        params.min_regions +
        static_cast<int>(rng.below(static_cast<std::uint64_t>(params.max_regions -
                                                              params.min_regions + 1)));
    for (int r = 0; r < n_regions; ++r) {
      const int w = S / 6 + static_cast<int>(rng.below(static_cast<std::uint64_t>(S / 2)));
      const int h = S / 6 + static_cast<int>(rng.below(static_cast<std::uint64_t>(S / 2)));
      const int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(S - w + 1)));
      const int y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(S - h + 1)));
      paint_region(scene.image, scene.mask, x0, y0, x0 + w, y0 + h, pick_class(),
                   params.noise_sigma, rng);
    }
    scene.label = compute_proportions(scene.mask);
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

DatasetManifest synth_write(const SynthParams& params, const std::filesystem::path& out_dir) {
  std::vector<SynthScene> scenes = synth_generate(params);

  std::filesystem::create_directories(out_dir / "images");
  std::filesystem::create_directories(out_dir / "masks");

  DatasetManifest manifest;
  manifest.seed = params.seed;

  // Dataset channel statistics over the generated images, on the 0..1 scale.
  std::array<double, 3> sum{}, sumsq{};
  std::size_t count = 0;
  for (const SynthScene& s : scenes) {
    for (int y = 0; y < s.image.height; ++y)
      for (int x = 0; x < s.image.width; ++x) {
        const std::uint8_t* px = s.image.at(x, y);
        for (int c = 0; c < 3; ++c) {
          const double v = px[c] / 255.0;
          sum[c] += v;
          sumsq[c] += v * v;
        }
      }
    count += static_cast<std::size_t>(s.image.width) * s.image.height;
  }
  for (int c = 0; c < 3; ++c) {
    const double mean = sum[c] / count;
    const double var = std::max(sumsq[c] / count - mean * mean, 1e-12);
    manifest.stats.mean[c] = mean;
    manifest.stats.stddev[c] = std::sqrt(var);
  }

  for (const SynthScene& s : scenes) {
    const std::string img_rel = "images/" + s.id + "_sat.png";
    const std::string mask_rel = "masks/" + s.id + "_mask.png";
    write_png(out_dir / img_rel, s.image);
    write_png(out_dir / mask_rel, encode_mask(s.mask));
    manifest.entries.push_back({s.id, img_rel, mask_rel, s.label});
  }
  manifest.base_dir = out_dir;
  save_manifest(out_dir / "manifest.csv", manifest);
  return manifest;
}

}  // namespace lcc::data
