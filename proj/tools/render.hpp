#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lcc/data/image.hpp"
#include "lcc/data/mask.hpp"
#include "lcc/nd/tensor.hpp"

namespace lcc::tools {

/// Signed evidence plane -> diverging blue/white/red image, symmetric range
/// centered at zero with a data-driven bound per plane.
data::ImageU8 render_diverging(const std::vector<double>& plane, int width, int height);

/// Tiles a per-cell value grid (row-major, grid x grid) over a full image.
std::vector<double> tile_cell_values(const std::vector<double>& cells, int grid, int width,
                                     int height);

/// Side-by-side composite with 4px white gutters.
data::ImageU8 compose_panels(const std::vector<data::ImageU8>& panels);

}  // namespace lcc::tools
