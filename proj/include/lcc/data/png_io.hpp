#pragma once

#include <filesystem>

#include "lcc/data/image.hpp"

namespace lcc::data {

/// Reads a PNG or binary PPM (P6) file as 8-bit RGB. Grayscale and paletted
/// PNGs are expanded; 16-bit is reduced.
ImageU8 read_image(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const ImageU8& img);
void write_ppm(const std::filesystem::path& path, const ImageU8& img);

/// Dispatches on extension (.png or .ppm).
void write_image(const std::filesystem::path& path, const ImageU8& img);

}  // namespace lcc::data
