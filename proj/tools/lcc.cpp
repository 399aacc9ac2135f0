// lcc: weakly-supervised land-cover classification toolkit.
// Commands: prepare, synth, train, eval, segment, report.
// Exit codes: 0 success, 2 usage error, 1 runtime error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lcc/data/folds.hpp"
#include "lcc/data/png_io.hpp"
#include "lcc/data/synth.hpp"
#include "lcc/metrics/miou.hpp"
#include "lcc/metrics/report.hpp"
#include "lcc/models/registry.hpp"
#include "lcc/train/experiment.hpp"
#include "lcc/train/trainer.hpp"
#include "render.hpp"

namespace fs = std::filesystem;
using namespace lcc;
using json = nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path out_root() {
  if (const char* env = std::getenv("LCC_OUT_ROOT")) return fs::path(env);
  return fs::current_path();
}

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream is(path);
  if (!is) throw UsageError("config file not found: " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw UsageError("config file " + path + " is not valid JSON: " + e.what());
  }
  return j;
}

// Precedence: command-line flag > config file > fallback.
template <typename T>
T effective(const CLI::Option* opt, const T& flag_value, const json& cfg, const char* key,
            const T& fallback) {
  if (opt && opt->count() > 0) return flag_value;
  if (cfg.contains(key)) return cfg.at(key).get<T>();
  return fallback;
}

std::string resolve_model_id(std::string model, std::optional<int> grid) {
  if (model.rfind("s2p-", 0) == 0 && grid) {
    std::vector<std::string> parts;
    std::stringstream ss(model);
    std::string part;
    while (std::getline(ss, part, '-')) parts.push_back(part);
    if (parts.size() >= 2)
      return parts[0] + "-" + parts[1] + "-" + std::to_string(*grid);
  }
  return model;
}

void require_known_model(const std::string& id) {
  if (!models::is_known_config_id(id)) {
    std::string known;
    for (const auto& k : models::known_config_ids()) known += " " + k;
    throw UsageError("unknown model configuration \"" + id + "\"; known:" + known);
  }
}

data::ClassProportions label_placeholder() { return data::ClassProportions::one_hot(0); }

// ---- prepare ----

struct PrepareArgs {
  std::string root;
  std::string out;
  bool computed_stats = false;
  bool strict_colors = false;
};

int cmd_prepare(const PrepareArgs& args) {
  const fs::path root(args.root);
  if (!fs::is_directory(root)) throw UsageError("dataset root is not a directory: " + args.root);
  const fs::path out(args.out);

  // Pair *_sat and *_mask files by scene id.
  std::map<std::string, fs::path> sats, masks;
  std::vector<std::string> skipped;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const fs::path p = entry.path();
    const std::string ext = p.extension().string();
    const std::string stem = p.stem().string();
    const bool supported = ext == ".png" || ext == ".ppm";
    if (stem.size() > 4 && stem.ends_with("_sat")) {
      if (supported)
        sats[stem.substr(0, stem.size() - 4)] = p;
      else
        skipped.push_back(p.string() + " (unsupported format)");
    } else if (stem.size() > 5 && stem.ends_with("_mask")) {
      if (supported)
        masks[stem.substr(0, stem.size() - 5)] = p;
      else
        skipped.push_back(p.string() + " (unsupported format)");
    }
  }
  for (const auto& [id, p] : sats)
    if (!masks.count(id)) skipped.push_back(p.string() + " (no mask)");
  for (const auto& [id, p] : masks)
    if (!sats.count(id)) skipped.push_back(p.string() + " (no image)");

  std::size_t n_pairs = 0;
  for (const auto& [id, p] : sats) n_pairs += masks.count(id);
  if (n_pairs == 0) throw std::runtime_error("prepare: no paired *_sat / *_mask images under " +
                                             args.root);

  fs::create_directories(out);
  data::DatasetManifest manifest;
  manifest.stats = data::deepglobe_stats();

  std::array<double, 3> sum{}, sumsq{};
  std::size_t n_px = 0;
  std::array<double, data::kNumClasses> balance{};
  std::size_t off_palette_total = 0;

  for (const auto& [id, sat_path] : sats) {
    auto mask_it = masks.find(id);
    if (mask_it == masks.end()) continue;
    data::ImageU8 mask_rgb = data::read_image(mask_it->second);
    data::MaskDecodeStats stats;
    data::MaskImage mask = data::decode_mask(
        mask_rgb, args.strict_colors ? data::ColorMatch::Strict : data::ColorMatch::Nearest,
        &stats);
    off_palette_total += stats.off_palette;
    data::ClassProportions label = data::compute_proportions(mask);
    for (int c = 0; c < data::kNumClasses; ++c) balance[c] += label[c];

    if (args.computed_stats) {
      data::ImageU8 img = data::read_image(sat_path);
      for (std::size_t i = 0; i < img.pixels.size(); i += 3)
        for (int c = 0; c < 3; ++c) {
          const double v = img.pixels[i + c] / 255.0;
          sum[c] += v;
          sumsq[c] += v * v;
        }
      n_px += img.pixels.size() / 3;
    }

    data::ManifestEntry e;
    e.scene_id = id;
    e.image_path = fs::relative(sat_path, out).generic_string();
    e.mask_path = fs::relative(mask_it->second, out).generic_string();
    e.label = label;
    manifest.entries.push_back(std::move(e));
  }

  if (args.computed_stats) {
    for (int c = 0; c < 3; ++c) {
      const double mean = sum[c] / double(n_px);
      manifest.stats.mean[c] = mean;
      manifest.stats.stddev[c] = std::sqrt(std::max(sumsq[c] / double(n_px) - mean * mean, 1e-12));
    }
  }
  manifest.base_dir = out;
  data::save_manifest(out / "manifest.csv", manifest);

  std::printf("prepared %zu scenes -> %s\n", manifest.entries.size(),
              (out / "manifest.csv").string().c_str());
  std::printf("class balance (mean proportion):\n");
  for (int c = 0; c < data::kNumClasses; ++c)
    std::printf("  %-12s %.4f\n", data::class_name(c), balance[c] / manifest.entries.size());
  if (off_palette_total > 0)
    std::printf("warning: %zu off-palette mask pixels resolved to nearest class\n",
                off_palette_total);
  for (const auto& s : skipped) std::printf("skipped: %s\n", s.c_str());
  if (!skipped.empty()) std::printf("warning: %zu files skipped\n", skipped.size());
  return 0;
}

// ---- synth ----

struct SynthArgs {
  int n = 10;
  int size = 48;
  std::uint64_t seed = 0;
  std::string out;
  double noise = 6.0;
  std::vector<int> classes;
};

int cmd_synth(const SynthArgs& args) {
  data::SynthParams params;
  params.n_scenes = args.n;
  params.scene_size = args.size;
  params.seed = args.seed;
  params.noise_sigma = args.noise;
  if (!args.classes.empty()) params.active_classes = args.classes;
  if (args.size % 8 != 0 || args.size % 16 != 0 || args.size % 24 != 0)
    throw UsageError("synth: size must be divisible by 8, 16 and 24");

  const fs::path out(args.out);
  fs::create_directories(out);
  data::DatasetManifest manifest = data::synth_write(params, out);

  // Self-check: recount the masks that were actually written.
  for (const auto& e : manifest.entries) {
    data::MaskImage mask =
        data::decode_mask(data::read_image(manifest.mask_file(e)), data::ColorMatch::Strict);
    data::ClassProportions recount = data::compute_proportions(mask);
    for (int c = 0; c < data::kNumClasses; ++c)
      if (recount[c] != e.label[c])
        throw std::runtime_error("synth: self-check failed for scene " + e.scene_id);
  }
  std::printf("wrote %d synthetic scenes (%dx%d, seed %llu) -> %s\n", args.n, args.size, args.size,
              static_cast<unsigned long long>(args.seed), out.string().c_str());
  std::printf("self-check: stored labels match mask recount\n");
  return 0;
}

// ---- train ----

struct TrainArgs {
  std::string manifest;
  std::string model;
  std::optional<int> grid;
  int fold = 0;
  int folds = 5;
  int repeats = 1;
  std::uint64_t seed = 0;
  double lr = -1;
  double weight_decay = -1;
  double dropout = -1;
  int epochs = 30;
  int patience = 5;
  bool cv = false;
  std::string out;
};

int cmd_train(const TrainArgs& args) {
  const std::string model_id = resolve_model_id(args.model, args.grid);
  require_known_model(model_id);
  if (args.fold < 0 || args.fold >= args.folds)
    throw UsageError("fold index " + std::to_string(args.fold) + " outside 0.." +
                     std::to_string(args.folds - 1));

  data::DatasetManifest manifest = data::load_manifest(args.manifest);

  const models::TrainDefaults defaults = models::defaults_for(model_id);
  train::TrainConfig cfg;
  cfg.lr = args.lr >= 0 ? args.lr : defaults.lr;
  cfg.weight_decay = args.weight_decay >= 0 ? args.weight_decay : defaults.weight_decay;
  cfg.patience = args.patience;
  cfg.max_epochs = args.epochs;
  cfg.seed = args.seed;
  cfg.validate();
  const double dropout = args.dropout >= 0 ? args.dropout : defaults.dropout;

  const fs::path out(args.out);
  fs::create_directories(out);

  if (args.cv) {
    train::CvExperiment exp =
        train::run_cv_experiment(manifest, model_id, cfg, args.folds, args.repeats, dropout);
    for (const auto& run : exp.runs) {
      const std::string tag =
          model_id + "-fold" + std::to_string(run.fold) + "-rep" + std::to_string(run.repeat);
      metrics::write_report_csv(out / (tag + "-report.csv"), run.report);
      train::write_train_log_csv(out / (tag + "-log.csv"), run.log);
    }
    metrics::write_aggregate_csv(out / "results.csv", exp.aggregate);
    const std::string table = metrics::format_aggregate_table(exp.aggregate);
    std::ofstream(out / "results.txt") << table;
    std::printf("%s", table.c_str());
    return 0;
  }

  const auto folds = data::make_folds(manifest, args.folds, args.seed);
  const data::FoldSplit& fold = folds[args.fold];
  auto model = models::build_model(model_id, args.seed, dropout);
  const models::BagGeometry geom = model->geometry();
  std::printf("training %s (%zu params) on fold %d: %zu train / %zu val scenes\n",
              model_id.c_str(), model->parameter_count(), args.fold, fold.train.size(),
              fold.validation.size());
  auto train_bags = train::load_bags(manifest, fold.train, geom, false);
  auto val_bags = train::load_bags(manifest, fold.validation, geom, false);

  train::TrainLog log = train::train_model(*model, train_bags, val_bags, cfg);

  const std::string tag = model_id + "-fold" + std::to_string(args.fold);
  models::save_model(out / (tag + ".ckpt"), *model, manifest.stats);
  train::write_train_log_csv(out / (tag + "-log.csv"), log);
  std::printf("best val RMSE %.6f at epoch %d (%s after %zu epochs); checkpoint %s\n",
              log.best_val_rmse, log.best_epoch, log.stop_reason.c_str(), log.epochs.size(),
              (out / (tag + ".ckpt")).string().c_str());
  return 0;
}

// ---- eval ----

struct EvalArgs {
  std::string checkpoint;
  std::string manifest;
  int fold = 0;
  int folds = 5;
  std::uint64_t seed = 0;
  bool all = false;
  bool ignore_unknown = false;
  std::string out;
};

int cmd_eval(const EvalArgs& args) {
  models::LoadedModel loaded = models::load_model(args.checkpoint);
  data::DatasetManifest manifest = data::load_manifest(args.manifest);
  manifest.stats = loaded.stats;  // evaluate with the training-time normalization

  std::vector<std::string> scenes;
  if (args.all) {
    for (const auto& e : manifest.entries) scenes.push_back(e.scene_id);
  } else {
    if (args.fold < 0 || args.fold >= args.folds)
      throw UsageError("fold index outside 0.." + std::to_string(args.folds - 1));
    scenes = data::make_folds(manifest, args.folds, args.seed)[args.fold].test;
  }

  const fs::path out(args.out);
  fs::create_directories(out);

  metrics::MetricsReport report =
      train::evaluate_model(*loaded.model, manifest, scenes, args.ignore_unknown);
  metrics::write_report_csv(out / "report.csv", report);
  std::ofstream(out / "report.txt") << metrics::format_report_text(report) << "\n";
  std::printf("%s\n", metrics::format_report_text(report).c_str());

  bool missing_masks = false;
  for (const auto& id : scenes) missing_masks |= manifest.find(id).mask_path.empty();
  if (!report.pixel_miou && missing_masks)
    std::printf("notice: segmentation metrics omitted (no masks for the evaluated scenes)\n");
  return 0;
}

// ---- segment ----

struct SegmentArgs {
  std::string checkpoint;
  std::string image;
  std::string mask;
  std::string out;
};

data::ImageU8 nearest_resize_mask_rgb(const data::MaskImage& mask, int w, int h) {
  data::MaskImage resized(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      resized.at(x, y) =
          mask.at(x * mask.width / w, y * mask.height / h);
  return data::encode_mask(resized);
}

int cmd_segment(const SegmentArgs& args) {
  models::LoadedModel loaded = models::load_model(args.checkpoint);
  models::Model& model = *loaded.model;
  const models::BagGeometry geom = model.geometry();
  const std::string& id = model.config_id();

  data::ImageU8 scene = data::read_image(args.image);
  std::optional<data::MaskImage> truth;
  if (!args.mask.empty()) truth = data::decode_mask(data::read_image(args.mask));

  const fs::path out(args.out);
  fs::create_directories(out);

  const bool is_unet = id.rfind("unet-", 0) == 0;
  if (id == "scene-baseline")
    throw std::runtime_error(
        "scene-baseline makes scene-level predictions only and produces no segmentation; "
        "use an s2p-* or unet-* checkpoint");

  data::ImageU8 predicted_rgb;
  std::vector<std::vector<double>> evidence(data::kNumClasses);  // full-resolution planes
  int map_w = 0, map_h = 0;
  nd::Tensor scene_pred;

  if (is_unet) {
    // Any scene size is accepted: the input is resized to the model size.
    data::ImageF resized = data::resize_bilinear(data::to_float(scene), geom.patch_px,
                                                 geom.patch_px);
    data::Bag bag;
    bag.scene_id = "scene";
    bag.grid_rows = bag.grid_cols = 1;
    bag.patches.push_back(data::normalize_patch(resized, loaded.stats));
    bag.label = label_placeholder();
    models::PredictionBundle bundle = model.predict(bag, true);
    scene_pred = bundle.scene_pred;

    map_w = map_h = geom.patch_px;
    const std::size_t plane = static_cast<std::size_t>(map_w) * map_h;
    data::MaskImage hard(map_w, map_h);
    for (std::size_t i = 0; i < plane; ++i) {
      int best = 0;
      for (int c = 1; c < data::kNumClasses; ++c)
        if (bundle.evidence_maps[c * plane + i] > bundle.evidence_maps[best * plane + i])
          best = c;
      hard.classes[i] = static_cast<std::uint8_t>(best);
    }
    predicted_rgb = data::encode_mask(hard);
    for (int c = 0; c < data::kNumClasses; ++c)
      evidence[c].assign(bundle.evidence_maps.data() + c * plane,
                         bundle.evidence_maps.data() + (c + 1) * plane);
  } else {
    if (scene.width % geom.grid_size != 0 || scene.height % geom.grid_size != 0)
      throw std::runtime_error("scene " + std::to_string(scene.width) + "x" +
                               std::to_string(scene.height) + " is not divisible by grid " +
                               std::to_string(geom.grid_size) +
                               "; resize the scene to a divisible size first");
    data::Bag bag = data::make_bag("scene", scene, geom.grid_size, geom.patch_px, loaded.stats,
                                   label_placeholder());
    models::PredictionBundle bundle = model.predict(bag);
    scene_pred = bundle.scene_pred;

    map_w = scene.width;
    map_h = scene.height;
    const auto classes = metrics::argmax_classes(bundle.patch_preds);
    predicted_rgb =
        data::encode_mask(metrics::tile_patch_classes(classes, geom.grid_size, map_w, map_h));
    const std::size_t k = bundle.patch_preds.dim(0);
    for (int c = 0; c < data::kNumClasses; ++c) {
      std::vector<double> cells(k);
      for (std::size_t j = 0; j < k; ++j) cells[j] = bundle.patch_preds[j * 7 + c];
      evidence[c] = tools::tile_cell_values(cells, geom.grid_size, map_w, map_h);
    }
  }

  data::write_png(out / "predicted_mask.png", predicted_rgb);
  for (int c = 0; c < data::kNumClasses; ++c) {
    data::write_png(out / ("evidence_" + std::string(data::class_name(c)) + "_unweighted.png"),
                    tools::render_diverging(evidence[c], map_w, map_h));
    std::vector<double> weighted = evidence[c];
    for (double& v : weighted) v *= scene_pred[c];
    data::write_png(out / ("evidence_" + std::string(data::class_name(c)) + "_weighted.png"),
                    tools::render_diverging(weighted, map_w, map_h));
  }

  std::vector<data::ImageU8> panels;
  if (is_unet)
    panels.push_back(data::to_u8(data::resize_bilinear(data::to_float(scene), map_w, map_h)));
  else
    panels.push_back(scene);
  if (truth) panels.push_back(nearest_resize_mask_rgb(*truth, map_w, map_h));
  panels.push_back(predicted_rgb);
  data::write_png(out / "composite.png", tools::compose_panels(panels));

  std::printf("predicted scene proportions:\n");
  for (int c = 0; c < data::kNumClasses; ++c)
    std::printf("  %-12s %+.4f\n", data::class_name(c), scene_pred[c]);
  std::printf("outputs written to %s\n", out.string().c_str());
  return 0;
}

// ---- report ----

struct ReportArgs {
  std::string dir;
  std::string out;
};

int cmd_report(const ReportArgs& args) {
  const fs::path dir(args.dir);
  if (!fs::is_directory(dir)) throw UsageError("not a directory: " + args.dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    std::ifstream is(entry.path());
    std::string header;
    std::getline(is, header);
    if (header.rfind("config,scene_rmse", 0) == 0) files.push_back(entry.path());
  }
  if (files.empty()) throw std::runtime_error("report: no result files under " + args.dir);
  std::sort(files.begin(), files.end());

  std::vector<metrics::MetricsReport> reports;
  for (const auto& f : files) reports.push_back(metrics::read_report_csv(f));
  const auto rows = metrics::aggregate_reports(reports);

  const fs::path out(args.out);
  fs::create_directories(out);
  metrics::write_aggregate_csv(out / "aggregate.csv", rows);
  const std::string table = metrics::format_aggregate_table(rows);
  std::ofstream(out / "aggregate.txt") << table;
  std::printf("aggregated %zu result files\n%s", files.size(), table.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lcc: weakly-supervised land-cover classification toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags take precedence)")
      ->expected(1);

  PrepareArgs prep;
  auto* prepare = app.add_subcommand("prepare", "index a directory of *_sat / *_mask images");
  prepare->add_option("root", prep.root, "dataset root directory")->required();
  auto* prep_out = prepare->add_option("--out", prep.out, "output directory");
  prepare->add_flag("--computed-stats", prep.computed_stats,
                    "compute channel statistics from the images (default: DeepGlobe constants)");
  prepare->add_flag("--strict-colors", prep.strict_colors,
                    "error on off-palette mask pixels instead of nearest-color fallback");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
  auto* synth_n = synth_cmd->add_option("--n", synth.n, "number of scenes");
  auto* synth_size = synth_cmd->add_option("--size", synth.size, "scene size in pixels");
  auto* synth_seed = synth_cmd->add_option("--seed", synth.seed, "generator seed");
  auto* synth_out = synth_cmd->add_option("--out", synth.out, "output directory");
  synth_cmd->add_option("--noise", synth.noise, "per-pixel gaussian sigma (8-bit scale)");
  synth_cmd->add_option("--classes", synth.classes, "active class indices");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "train a model configuration");
  auto* tr_manifest = train_cmd->add_option("--manifest", tr.manifest, "manifest CSV")->required();
  auto* tr_model = train_cmd->add_option("--model", tr.model, "model configuration id")->required();
  int tr_grid = 0;
  auto* tr_grid_opt = train_cmd->add_option("--grid", tr_grid, "grid size override (s2p models)");
  auto* tr_fold = train_cmd->add_option("--fold", tr.fold, "fold index to train");
  auto* tr_folds = train_cmd->add_option("--folds", tr.folds, "number of folds");
  auto* tr_repeats = train_cmd->add_option("--repeats", tr.repeats, "repeats (with --cv)");
  auto* tr_seed = train_cmd->add_option("--seed", tr.seed, "seed");
  auto* tr_lr = train_cmd->add_option("--lr", tr.lr, "learning rate (default: per-config table)");
  auto* tr_wd = train_cmd->add_option("--weight-decay", tr.weight_decay, "weight decay");
  auto* tr_do = train_cmd->add_option("--dropout", tr.dropout, "dropout rate");
  auto* tr_epochs = train_cmd->add_option("--epochs", tr.epochs, "maximum epochs");
  auto* tr_patience = train_cmd->add_option("--patience", tr.patience, "early stopping patience");
  train_cmd->add_flag("--cv", tr.cv, "run the full cross-validation experiment");
  auto* tr_out = train_cmd->add_option("--out", tr.out, "output directory");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "model checkpoint")->required();
  auto* ev_manifest = eval_cmd->add_option("--manifest", ev.manifest, "manifest CSV")->required();
  auto* ev_fold = eval_cmd->add_option("--fold", ev.fold, "fold index to evaluate (test split)");
  auto* ev_folds = eval_cmd->add_option("--folds", ev.folds, "number of folds");
  auto* ev_seed = eval_cmd->add_option("--seed", ev.seed, "fold seed");
  eval_cmd->add_flag("--all", ev.all, "evaluate on every scene in the manifest");
  eval_cmd->add_flag("--ignore-unknown", ev.ignore_unknown,
                     "exclude unknown-class pixels from pixel mIoU");
  auto* ev_out = eval_cmd->add_option("--out", ev.out, "output directory");

  SegmentArgs seg;
  auto* seg_cmd = app.add_subcommand("segment", "render segmentation outputs for one scene");
  seg_cmd->add_option("--checkpoint", seg.checkpoint, "model checkpoint")->required();
  seg_cmd->add_option("--image", seg.image, "scene image (PNG or PPM)")->required();
  seg_cmd->add_option("--mask", seg.mask, "optional ground-truth mask image");
  auto* seg_out = seg_cmd->add_option("--out", seg.out, "output directory");

  ReportArgs rep;
  auto* report_cmd = app.add_subcommand("report", "aggregate fold result files");
  report_cmd->add_option("--dir", rep.dir, "directory of per-fold report CSVs")->required();
  auto* rep_out = report_cmd->add_option("--out", rep.out, "output directory");

  // lets `lcc <cmd> --config file.json` reach the app-level --config option
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  try {
    const json cfg = load_config_file(config_path);
    const fs::path root = out_root();

    if (*prepare) {
      prep.out = effective(prep_out, prep.out, cfg, "out", (root / "lcc-prepare").string());
      return cmd_prepare(prep);
    }
    if (*synth_cmd) {
      synth.n = effective(synth_n, synth.n, cfg, "n", synth.n);
      synth.size = effective(synth_size, synth.size, cfg, "size", synth.size);
      synth.seed = effective(synth_seed, synth.seed, cfg, "seed", synth.seed);
      synth.out = effective(synth_out, synth.out, cfg, "out", (root / "lcc-synth").string());
      return cmd_synth(synth);
    }
    if (*train_cmd) {
      tr.manifest = effective(tr_manifest, tr.manifest, cfg, "manifest", tr.manifest);
      tr.model = effective(tr_model, tr.model, cfg, "model", tr.model);
      if (tr_grid_opt->count() > 0)
        tr.grid = tr_grid;
      else if (cfg.contains("grid"))
        tr.grid = cfg.at("grid").get<int>();
      tr.fold = effective(tr_fold, tr.fold, cfg, "fold", tr.fold);
      tr.folds = effective(tr_folds, tr.folds, cfg, "folds", tr.folds);
      tr.repeats = effective(tr_repeats, tr.repeats, cfg, "repeats", tr.repeats);
      tr.seed = effective(tr_seed, tr.seed, cfg, "seed", tr.seed);
      tr.lr = effective(tr_lr, tr.lr, cfg, "lr", tr.lr);
      tr.weight_decay = effective(tr_wd, tr.weight_decay, cfg, "weight_decay", tr.weight_decay);
      tr.dropout = effective(tr_do, tr.dropout, cfg, "dropout", tr.dropout);
      tr.epochs = effective(tr_epochs, tr.epochs, cfg, "epochs", tr.epochs);
      tr.patience = effective(tr_patience, tr.patience, cfg, "patience", tr.patience);
      tr.out = effective(tr_out, tr.out, cfg, "out", (root / "lcc-train").string());
      return cmd_train(tr);
    }
    if (*eval_cmd) {
      ev.manifest = effective(ev_manifest, ev.manifest, cfg, "manifest", ev.manifest);
      ev.fold = effective(ev_fold, ev.fold, cfg, "fold", ev.fold);
      ev.folds = effective(ev_folds, ev.folds, cfg, "folds", ev.folds);
      ev.seed = effective(ev_seed, ev.seed, cfg, "seed", ev.seed);
      ev.out = effective(ev_out, ev.out, cfg, "out", (root / "lcc-eval").string());
      return cmd_eval(ev);
    }
    if (*seg_cmd) {
      seg.out = effective(seg_out, seg.out, cfg, "out", (root / "lcc-segment").string());
      return cmd_segment(seg);
    }
    if (*report_cmd) {
      rep.out = effective(rep_out, rep.out, cfg, "out", (root / "lcc-report").string());
      return cmd_report(rep);
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
