#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lcc/data/bag.hpp"
#include "lcc/data/proportions.hpp"

namespace lcc::data {

struct ManifestEntry {
  std::string scene_id;
  std::string image_path;  // relative to the manifest file
  std::string mask_path;   // empty when the scene has no mask
  ClassProportions label;
};

/// Index of a dataset: scenes, labels, and the normalization statistics
/// needed to build bags. Persisted as a CSV with a JSON statistics sidecar.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  ChannelStats stats;
  std::uint64_t seed = 0;
  std::filesystem::path base_dir;  // set on load; resolves relative paths

  void validate() const;
  std::filesystem::path image_file(const ManifestEntry& e) const { return base_dir / e.image_path; }
  std::filesystem::path mask_file(const ManifestEntry& e) const { return base_dir / e.mask_path; }
  const ManifestEntry& find(const std::string& scene_id) const;
};

/// Writes `<path>` (CSV) and `<path minus extension>.stats.json`.
void save_manifest(const std::filesystem::path& csv_path, const DatasetManifest& manifest);

DatasetManifest load_manifest(const std::filesystem::path& csv_path);

}  // namespace lcc::data
