#include "render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lcc::tools {

data::ImageU8 render_diverging(const std::vector<double>& plane, int width, int height) {
  if (plane.size() != static_cast<std::size_t>(width) * height)
    throw std::invalid_argument("render_diverging: plane size does not match dimensions");
  double bound = 0.0;
  for (double v : plane) bound = std::max(bound, std::abs(v));
  if (bound == 0.0) bound = 1.0;

  data::ImageU8 img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double t = plane[static_cast<std::size_t>(y) * width + x] / bound;  // [-1, 1]
      double r, g, b;
      if (t < 0) {  // toward blue
        r = 1.0 + t;
        g = 1.0 + t;
        b = 1.0;
      } else {  // toward red
        r = 1.0;
        g = 1.0 - t;
        b = 1.0 - t;
      }
      auto* px = img.at(x, y);
      px[0] = static_cast<std::uint8_t>(std::lround(std::clamp(r, 0.0, 1.0) * 255));
      px[1] = static_cast<std::uint8_t>(std::lround(std::clamp(g, 0.0, 1.0) * 255));
      px[2] = static_cast<std::uint8_t>(std::lround(std::clamp(b, 0.0, 1.0) * 255));
    }
  }
  return img;
}

std::vector<double> tile_cell_values(const std::vector<double>& cells, int grid, int width,
                                     int height) {
  if (cells.size() != static_cast<std::size_t>(grid) * grid)
    throw std::invalid_argument("tile_cell_values: expected grid*grid cells");
  if (width % grid != 0 || height % grid != 0)
    throw std::invalid_argument("tile_cell_values: dimensions not divisible by grid");
  const int cw = width / grid, ch = height / grid;
  std::vector<double> out(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      out[static_cast<std::size_t>(y) * width + x] =
          cells[static_cast<std::size_t>(y / ch) * grid + (x / cw)];
  return out;
}

data::ImageU8 compose_panels(const std::vector<data::ImageU8>& panels) {
  if (panels.empty()) throw std::invalid_argument("compose_panels: no panels");
  const int pad = 4;
  const int h = panels.front().height;
  int w = 0;
  for (const auto& p : panels) {
    if (p.height != h) throw std::invalid_argument("compose_panels: mismatched panel heights");
    w += p.width;
  }
  w += pad * (static_cast<int>(panels.size()) - 1);

  data::ImageU8 out(w, h);
  std::fill(out.pixels.begin(), out.pixels.end(), 255);
  int x0 = 0;
  for (const auto& p : panels) {
    for (int y = 0; y < h; ++y)
      std::copy_n(p.at(0, y), static_cast<std::size_t>(3) * p.width, out.at(x0, y));
    x0 += p.width + pad;
  }
  return out;
}

}  // namespace lcc::tools
