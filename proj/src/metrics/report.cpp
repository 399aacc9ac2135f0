#include "lcc/metrics/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lcc::metrics {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

std::string cell(double mean, double se) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3f +/- %.3f", mean, se);
  return buf;
}

}  // namespace

double mean_of(const std::vector<double>& values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double standard_error(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double m = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

void write_report_csv(const std::filesystem::path& path, const MetricsReport& report) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("report: cannot write " + path.string());
  os << "config,scene_rmse,scene_mae,patch_miou,pixel_miou\n";
  os << report.config_id << "," << fmt(report.scene_rmse) << "," << fmt(report.scene_mae) << ","
     << fmt_opt(report.patch_miou) << "," << fmt_opt(report.pixel_miou) << "\n";
}

MetricsReport read_report_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("report: cannot open " + path.string());
  std::string header, line;
  if (!std::getline(is, header) || !std::getline(is, line))
    throw std::runtime_error("report: malformed file " + path.string());
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  while (fields.size() < 5) fields.push_back("");
  MetricsReport r;
  r.config_id = fields[0];
  r.scene_rmse = std::stod(fields[1]);
  r.scene_mae = std::stod(fields[2]);
  if (!fields[3].empty()) r.patch_miou = std::stod(fields[3]);
  if (!fields[4].empty()) r.pixel_miou = std::stod(fields[4]);
  return r;
}

std::string format_report_text(const MetricsReport& report) {
  std::ostringstream os;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%-16s scene RMSE %.4f  scene MAE %.4f", report.config_id.c_str(),
                report.scene_rmse, report.scene_mae);
  os << buf;
  if (report.patch_miou) {
    std::snprintf(buf, sizeof(buf), "  patch mIoU %.4f", *report.patch_miou);
    os << buf;
  }
  if (report.pixel_miou) {
    std::snprintf(buf, sizeof(buf), "  pixel mIoU %.4f", *report.pixel_miou);
    os << buf;
  }
  return os.str();
}

std::vector<AggregateRow> aggregate_reports(const std::vector<MetricsReport>& reports) {
  std::map<std::string, std::vector<const MetricsReport*>> by_config;
  std::vector<std::string> order;
  for (const auto& r : reports) {
    if (by_config.find(r.config_id) == by_config.end()) order.push_back(r.config_id);
    by_config[r.config_id].push_back(&r);
  }
  std::vector<AggregateRow> rows;
  for (const std::string& id : order) {
    const auto& group = by_config[id];
    AggregateRow row;
    row.config_id = id;
    row.n_runs = static_cast<int>(group.size());
    std::vector<double> rmse, mae, patch, pixel;
    for (const MetricsReport* r : group) {
      rmse.push_back(r->scene_rmse);
      mae.push_back(r->scene_mae);
      if (r->patch_miou) patch.push_back(*r->patch_miou);
      if (r->pixel_miou) pixel.push_back(*r->pixel_miou);
    }
    row.rmse_mean = mean_of(rmse);
    row.rmse_se = standard_error(rmse);
    row.mae_mean = mean_of(mae);
    row.mae_se = standard_error(mae);
    if (!patch.empty()) {
      row.patch_mean = mean_of(patch);
      row.patch_se = standard_error(patch);
    }
    if (!pixel.empty()) {
      row.pixel_mean = mean_of(pixel);
      row.pixel_se = standard_error(pixel);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_aggregate_csv(const std::filesystem::path& path,
                         const std::vector<AggregateRow>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("report: cannot write " + path.string());
  os << "config,n_runs,scene_rmse_mean,scene_rmse_se,scene_mae_mean,scene_mae_se,"
        "patch_miou_mean,patch_miou_se,pixel_miou_mean,pixel_miou_se\n";
  for (const auto& r : rows) {
    os << r.config_id << "," << r.n_runs << "," << fmt(r.rmse_mean) << "," << fmt(r.rmse_se) << ","
       << fmt(r.mae_mean) << "," << fmt(r.mae_se) << "," << fmt_opt(r.patch_mean) << ","
       << fmt_opt(r.patch_se) << "," << fmt_opt(r.pixel_mean) << "," << fmt_opt(r.pixel_se)
       << "\n";
  }
}

std::string format_aggregate_table(const std::vector<AggregateRow>& rows) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-16s %-17s %-17s %-17s %-17s\n", "Configuration",
                "Scene RMSE", "Scene MAE", "Patch mIoU", "Pixel mIoU");
  os << buf;
  for (const auto& r : rows) {
    const std::string patch = r.patch_mean ? cell(*r.patch_mean, *r.patch_se) : "N/A";
    const std::string pixel = r.pixel_mean ? cell(*r.pixel_mean, *r.pixel_se) : "N/A";
    std::snprintf(buf, sizeof(buf), "%-16s %-17s %-17s %-17s %-17s\n", r.config_id.c_str(),
                  cell(r.rmse_mean, r.rmse_se).c_str(), cell(r.mae_mean, r.mae_se).c_str(),
                  patch.c_str(), pixel.c_str());
    os << buf;
  }
  return os.str();
}

}  // namespace lcc::metrics
