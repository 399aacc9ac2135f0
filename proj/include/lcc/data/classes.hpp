#pragma once

#include <array>
#include <cstdint>

namespace lcc::data {

inline constexpr int kNumClasses = 7;

using Rgb = std::array<std::uint8_t, 3>;

struct ClassDef {
  const char* name;
  Rgb mask_color;
};

/// DeepGlobe land-cover classes, in label-index order, with the RGB coding
/// used by the mask images.
inline constexpr std::array<ClassDef, kNumClasses> kClassTable = {{
    {"urban", {0, 255, 255}},
    {"agriculture", {255, 255, 0}},
    {"rangeland", {255, 0, 255}},
    {"forest", {0, 255, 0}},
    {"water", {0, 0, 255}},
    {"barren", {255, 255, 255}},
    {"unknown", {0, 0, 0}},
}};

inline constexpr Rgb class_color(int c) { return kClassTable[c].mask_color; }
inline constexpr const char* class_name(int c) { return kClassTable[c].name; }

}  // namespace lcc::data
