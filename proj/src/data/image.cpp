#include "lcc/data/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lcc::data {

ImageF to_float(const ImageU8& img) {
  ImageF out(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    out.pixels[i] = static_cast<double>(img.pixels[i]);
  return out;
}

ImageU8 to_u8(const ImageF& img) {
  ImageU8 out(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const double v = std::round(img.pixels[i]);
    out.pixels[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  return out;
}

void resize_bilinear_plane(const double* src, int src_w, int src_h, double* dst, int dst_w,
                           int dst_h) {
  const double sx = static_cast<double>(src_w) / dst_w;
  const double sy = static_cast<double>(src_h) / dst_h;
  for (int y = 0; y < dst_h; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    fy = std::clamp(fy, 0.0, static_cast<double>(src_h - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, src_h - 1);
    const double wy = fy - y0;
    for (int x = 0; x < dst_w; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      fx = std::clamp(fx, 0.0, static_cast<double>(src_w - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, src_w - 1);
      const double wx = fx - x0;
      const double top = src[y0 * src_w + x0] * (1 - wx) + src[y0 * src_w + x1] * wx;
      const double bot = src[y1 * src_w + x0] * (1 - wx) + src[y1 * src_w + x1] * wx;
      dst[y * dst_w + x] = top * (1 - wy) + bot * wy;
    }
  }
}

ImageF resize_bilinear(const ImageF& src, int out_w, int out_h) {
  ImageF out(out_w, out_h);
  // Deinterleave per channel so the plane kernel can be reused.
  std::vector<double> splane(static_cast<std::size_t>(src.width) * src.height);
  std::vector<double> dplane(static_cast<std::size_t>(out_w) * out_h);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < src.height; ++y)
      for (int x = 0; x < src.width; ++x)
        splane[static_cast<std::size_t>(y) * src.width + x] = src.pixels[src.offset(x, y) + c];
    resize_bilinear_plane(splane.data(), src.width, src.height, dplane.data(), out_w, out_h);
    for (int y = 0; y < out_h; ++y)
      for (int x = 0; x < out_w; ++x)
        out.pixels[out.offset(x, y) + c] = dplane[static_cast<std::size_t>(y) * out_w + x];
  }
  return out;
}

std::vector<ImageU8> split_cells(const ImageU8& img, int grid) {
  if (grid < 1) throw std::invalid_argument("split_cells: grid must be >= 1");
  if (img.width % grid != 0 || img.height % grid != 0)
    throw std::invalid_argument("split_cells: image " + std::to_string(img.width) + "x" +
                                std::to_string(img.height) + " is not divisible by grid " +
                                std::to_string(grid) +
                                "; resize the scene to a divisible size first");
  const int cw = img.width / grid;
  const int ch = img.height / grid;
  std::vector<ImageU8> cells;
  cells.reserve(static_cast<std::size_t>(grid) * grid);
  for (int gy = 0; gy < grid; ++gy) {
    for (int gx = 0; gx < grid; ++gx) {
      ImageU8 cell(cw, ch);
      for (int y = 0; y < ch; ++y) {
        const std::uint8_t* src = img.at(gx * cw, gy * ch + y);
        std::copy_n(src, static_cast<std::size_t>(3) * cw, cell.at(0, y));
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace lcc::data
