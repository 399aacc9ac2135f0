#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace lcc::data {

/// Interleaved 8-bit RGB raster, row-major.
struct ImageU8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // 3 * width * height

  ImageU8() = default;
  ImageU8(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(3) * w * h, 0) {}

  std::size_t offset(int x, int y) const {
    return 3 * (static_cast<std::size_t>(y) * width + x);
  }
  std::uint8_t* at(int x, int y) { return pixels.data() + offset(x, y); }
  const std::uint8_t* at(int x, int y) const { return pixels.data() + offset(x, y); }
};

/// Interleaved RGB raster in doubles on the 0..255 scale; the working type
/// for resampling.
struct ImageF {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  ImageF() = default;
  ImageF(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(3) * w * h, 0.0) {}

  std::size_t offset(int x, int y) const {
    return 3 * (static_cast<std::size_t>(y) * width + x);
  }
};

ImageF to_float(const ImageU8& img);
ImageU8 to_u8(const ImageF& img);  // rounds and clamps to 0..255

/// Bilinear resample with half-pixel center alignment (the convention where
/// sampling an image to its own size is the identity).
ImageF resize_bilinear(const ImageF& src, int out_w, int out_h);

/// Resamples one scalar plane; same convention as resize_bilinear.
void resize_bilinear_plane(const double* src, int src_w, int src_h, double* dst, int dst_w,
                           int dst_h);

/// Partitions an image into grid*grid equal cells, row-major. Throws if the
/// dimensions are not divisible by grid.
std::vector<ImageU8> split_cells(const ImageU8& img, int grid);

}  // namespace lcc::data
