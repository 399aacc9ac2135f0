#include "lcc/data/manifest.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace lcc::data {

namespace {

// %.17g round-trips doubles exactly, so labels reload bit-identical.
std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension("");
  p += ".stats.json";
  return p;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

void DatasetManifest::validate() const {
  std::set<std::string> ids;
  for (const auto& e : entries) {
    if (!ids.insert(e.scene_id).second)
      throw std::invalid_argument("manifest: duplicate scene id " + e.scene_id);
    e.label.validate();
  }
  for (double sd : stats.stddev)
    if (!(sd > 0.0)) throw std::invalid_argument("manifest: non-positive channel stddev");
}

const ManifestEntry& DatasetManifest::find(const std::string& scene_id) const {
  for (const auto& e : entries)
    if (e.scene_id == scene_id) return e;
  throw std::invalid_argument("manifest: unknown scene id " + scene_id);
}

void save_manifest(const std::filesystem::path& csv_path, const DatasetManifest& manifest) {
  std::ofstream os(csv_path);
  if (!os) throw std::runtime_error("manifest: cannot write " + csv_path.string());
  os << "scene_id,image_path,mask_path";
  for (int c = 0; c < kNumClasses; ++c) os << ",p_" << class_name(c);
  os << "\n";
  for (const auto& e : manifest.entries) {
    os << e.scene_id << "," << e.image_path << "," << e.mask_path;
    for (int c = 0; c < kNumClasses; ++c) os << "," << fmt_double(e.label[c]);
    os << "\n";
  }
  if (!os) throw std::runtime_error("manifest: write failed: " + csv_path.string());

  nlohmann::json j;
  j["channel_mean"] = manifest.stats.mean;
  j["channel_std"] = manifest.stats.stddev;
  j["seed"] = manifest.seed;
  nlohmann::json table = nlohmann::json::array();
  for (int c = 0; c < kNumClasses; ++c)
    table.push_back({{"name", class_name(c)},
                     {"color", {class_color(c)[0], class_color(c)[1], class_color(c)[2]}}});
  j["class_table"] = table;
  std::ofstream js(sidecar_path(csv_path));
  if (!js) throw std::runtime_error("manifest: cannot write stats sidecar");
  js << j.dump(2) << "\n";
}

DatasetManifest load_manifest(const std::filesystem::path& csv_path) {
  std::ifstream is(csv_path);
  if (!is) throw std::runtime_error("manifest: cannot open " + csv_path.string());
  DatasetManifest m;
  m.base_dir = csv_path.parent_path();

  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("manifest: empty file");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != static_cast<std::size_t>(3 + kNumClasses))
      throw std::runtime_error("manifest: malformed row: " + line);
    ManifestEntry e;
    e.scene_id = fields[0];
    e.image_path = fields[1];
    e.mask_path = fields[2];
    for (int c = 0; c < kNumClasses; ++c) e.label[c] = std::stod(fields[3 + c]);
    m.entries.push_back(std::move(e));
  }

  const auto side = sidecar_path(csv_path);
  std::ifstream js(side);
  if (js) {
    nlohmann::json j;
    js >> j;
    for (int c = 0; c < 3; ++c) {
      m.stats.mean[c] = j.at("channel_mean").at(c).get<double>();
      m.stats.stddev[c] = j.at("channel_std").at(c).get<double>();
    }
    m.seed = j.value("seed", std::uint64_t{0});
  }
  m.validate();
  return m;
}

}  // namespace lcc::data
