#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lcc/metrics/miou.hpp"
#include "lcc/metrics/report.hpp"
#include "oracles.hpp"

using namespace lcc;

TEST_CASE("argmax_classes picks the max with lowest-index tie break") {
  nd::Tensor preds(nd::Shape{3, 4});
  preds[0 * 4 + 1] = 0.9;  // row 0: [0, .9, 0, 0] -> 1
  // row 1: all equal -> 0
  preds[2 * 4 + 0] = -1;
  preds[2 * 4 + 1] = -1;
  preds[2 * 4 + 2] = -0.5;
  preds[2 * 4 + 3] = -0.5;  // row 2: tie between 2 and 3 -> 2
  auto got = metrics::argmax_classes(preds);
  CHECK(got[0] == 1);
  CHECK(got[1] == 0);
  CHECK(got[2] == 2);
}

TEST_CASE("argmax_classes matches a brute-force scan on random rows") {
  nd::Rng rng(61);
  nd::Tensor preds(nd::Shape{1000, 7});
  oracles::fill_uniform(preds, rng);
  auto got = metrics::argmax_classes(preds);
  for (std::size_t j = 0; j < 1000; ++j) {
    int best = 0;
    for (int c = 1; c < 7; ++c)
      if (preds[j * 7 + c] > preds[j * 7 + best]) best = c;
    CHECK(got[j] == best);
  }
}

TEST_CASE("miou perfect and fully-swapped cases") {
  metrics::ConfusionAccumulator perfect(3);
  perfect.add(0, 0, 10);
  perfect.add(1, 1, 5);
  perfect.add(2, 2, 2);
  CHECK(metrics::miou(perfect).miou == 1.0);

  metrics::ConfusionAccumulator swapped(2);
  swapped.add(0, 1, 6);
  swapped.add(1, 0, 6);
  CHECK(metrics::miou(swapped).miou == 0.0);

  metrics::ConfusionAccumulator empty(2);
  CHECK_THROWS_AS(metrics::miou(empty), std::invalid_argument);
}

TEST_CASE("miou excludes classes absent from both truth and prediction") {
  metrics::ConfusionAccumulator confusion(4);
  confusion.add(0, 0, 3);
  confusion.add(1, 0, 1);  // classes 2,3 untouched
  auto r = metrics::miou(confusion);
  CHECK(r.classes_skipped == 2);
  // IoU_0 = 3/4, IoU_1 = 0
  CHECK(r.miou == doctest::Approx((3.0 / 4 + 0.0) / 2).epsilon(1e-12));
  CHECK(std::isnan(r.per_class[2]));
}

TEST_CASE("miou matches the set-based oracle on random masks") {
  nd::Rng rng(62);
  for (int it = 0; it < 30; ++it) {
    const int n = 12 * 12;
    std::vector<std::uint8_t> truth(n), pred(n);
    for (int i = 0; i < n; ++i) {
      truth[i] = static_cast<std::uint8_t>(rng.below(3));
      pred[i] = static_cast<std::uint8_t>(rng.below(3));
    }
    metrics::ConfusionAccumulator confusion(3);
    for (int i = 0; i < n; ++i) confusion.add(truth[i], pred[i]);
    const double got = metrics::miou(confusion).miou;
    const double want = oracles::set_miou(truth, pred, 3);
    CHECK(std::abs(got - want) <= 1e-12);
  }
}

TEST_CASE("confusion accumulators merge associatively") {
  nd::Rng rng(63);
  metrics::ConfusionAccumulator whole(3), part1(3), part2(3);
  for (int i = 0; i < 200; ++i) {
    const int t = static_cast<int>(rng.below(3));
    const int p = static_cast<int>(rng.below(3));
    whole.add(t, p);
    (i % 2 ? part1 : part2).add(t, p);
  }
  part1.merge(part2);
  for (int t = 0; t < 3; ++t)
    for (int p = 0; p < 3; ++p) CHECK(part1.at(t, p) == whole.at(t, p));
}

TEST_CASE("patch_miou aggregates across scenes at dataset level") {
  // all patches correct -> 1.0
  metrics::PatchScene a{{0, 1, 2, 0}, {0, 1, 2, 0}};
  metrics::PatchScene b{{3, 3}, {3, 3}};
  std::vector<metrics::PatchScene> scenes = {a, b};
  CHECK(metrics::patch_miou(scenes).miou == 1.0);

  // single-class dataset, all correct: 1.0 with six classes skipped
  metrics::PatchScene only{{4, 4, 4}, {4, 4, 4}};
  std::vector<metrics::PatchScene> single = {only};
  auto r = metrics::patch_miou(single);
  CHECK(r.miou == 1.0);
  CHECK(r.classes_skipped == 6);

  metrics::PatchScene bad{{0, 1}, {0}};
  std::vector<metrics::PatchScene> mism = {bad};
  CHECK_THROWS_AS(metrics::patch_miou(mism), std::invalid_argument);
}

TEST_CASE("patch_miou equals the set oracle on a small synthetic set") {
  nd::Rng rng(64);
  std::vector<metrics::PatchScene> scenes;
  std::vector<std::uint8_t> all_truth, all_pred;
  for (int s = 0; s < 5; ++s) {
    metrics::PatchScene ps;
    for (int j = 0; j < 16; ++j) {
      ps.truth.push_back(static_cast<std::uint8_t>(rng.below(4)));
      ps.pred.push_back(static_cast<std::uint8_t>(rng.below(4)));
    }
    all_truth.insert(all_truth.end(), ps.truth.begin(), ps.truth.end());
    all_pred.insert(all_pred.end(), ps.pred.begin(), ps.pred.end());
    scenes.push_back(std::move(ps));
  }
  const double got = metrics::patch_miou(scenes).miou;
  const double want = oracles::set_miou(all_truth, all_pred, 4);
  CHECK(std::abs(got - want) <= 1e-12);
}

TEST_CASE("pixel_miou tiles patch classes over cell footprints") {
  // Uniform scene with correct patch predictions -> 1.0.
  data::MaskImage mask(8, 8);
  for (auto& c : mask.classes) c = 2;
  std::vector<std::uint8_t> pred(4, 2);
  metrics::PixelScene scene{pred, 2, &mask};
  std::vector<metrics::PixelScene> scenes = {scene};
  CHECK(metrics::pixel_miou(scenes).miou == 1.0);

  // When every cell is single-class, patch mIoU == pixel mIoU exactly.
  nd::Rng rng(65);
  data::MaskImage blocky(12, 12);
  std::vector<std::uint8_t> cell_truth;
  for (int gy = 0; gy < 3; ++gy)
    for (int gx = 0; gx < 3; ++gx) {
      const auto cls = static_cast<std::uint8_t>(rng.below(4));
      cell_truth.push_back(cls);
      for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) blocky.at(gx * 4 + x, gy * 4 + y) = cls;
    }
  std::vector<std::uint8_t> cell_pred;
  for (int j = 0; j < 9; ++j) cell_pred.push_back(static_cast<std::uint8_t>(rng.below(4)));

  metrics::PatchScene ps{cell_pred, cell_truth};
  std::vector<metrics::PatchScene> pss = {ps};
  metrics::PixelScene px{cell_pred, 3, &blocky};
  std::vector<metrics::PixelScene> pxs = {px};
  CHECK(metrics::patch_miou(pss).miou == doctest::Approx(metrics::pixel_miou(pxs).miou).epsilon(1e-15));
}

TEST_CASE("pixel_miou matches a per-pixel brute-force oracle on mixed cells") {
  nd::Rng rng(66);
  data::MaskImage mask(24, 24);
  for (auto& c : mask.classes) c = static_cast<std::uint8_t>(rng.below(4));
  std::vector<std::uint8_t> pred;
  for (int j = 0; j < 36; ++j) pred.push_back(static_cast<std::uint8_t>(rng.below(4)));

  metrics::PixelScene scene{pred, 6, &mask};
  std::vector<metrics::PixelScene> scenes = {scene};
  const double got = metrics::pixel_miou(scenes).miou;

  // oracle: materialize the tiled prediction then set-IoU per pixel
  data::MaskImage tiled = metrics::tile_patch_classes(pred, 6, 24, 24);
  std::vector<std::uint8_t> truth_flat(mask.classes.begin(), mask.classes.end());
  std::vector<std::uint8_t> pred_flat(tiled.classes.begin(), tiled.classes.end());
  // verify tiling independently: cell (x/4, y/4)
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 24; ++x)
      CHECK(tiled.at(x, y) == pred[(y / 4) * 6 + (x / 4)]);
  const double want = oracles::set_miou(truth_flat, pred_flat, 4);
  CHECK(std::abs(got - want) <= 1e-12);
}

TEST_CASE("pixel_miou scores unknown pixels by default and can exclude them") {
  data::MaskImage mask(4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) mask.at(x, y) = (y < 2) ? 6 : 0;  // top unknown, bottom urban
  std::vector<std::uint8_t> pred = {0, 0, 0, 0};  // grid 2: all urban

  metrics::PixelScene scene{pred, 2, &mask};
  std::vector<metrics::PixelScene> scenes = {scene};
  // scored: IoU_0 = 8/16, IoU_6 = 0 -> mean 0.25
  CHECK(metrics::pixel_miou(scenes, false).miou == doctest::Approx(0.25).epsilon(1e-12));
  // unknown excluded: IoU_0 = 8/8 = 1
  CHECK(metrics::pixel_miou(scenes, true).miou == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("flipping one correct patch never increases patch mIoU") {
  nd::Rng rng(67);
  for (int it = 0; it < 10; ++it) {
    metrics::PatchScene ps;
    for (int j = 0; j < 25; ++j) {
      ps.truth.push_back(static_cast<std::uint8_t>(rng.below(3)));
      ps.pred.push_back(rng.bernoulli(0.7) ? ps.truth.back()
                                           : static_cast<std::uint8_t>(rng.below(3)));
    }
    std::vector<metrics::PatchScene> scenes = {ps};
    const double before = metrics::patch_miou(scenes).miou;

    // flip the first correct patch to a wrong class
    for (std::size_t j = 0; j < ps.pred.size(); ++j) {
      if (ps.pred[j] == ps.truth[j]) {
        metrics::PatchScene flipped = ps;
        flipped.pred[j] = static_cast<std::uint8_t>((ps.truth[j] + 1) % 3);
        std::vector<metrics::PatchScene> fs = {flipped};
        CHECK(metrics::patch_miou(fs).miou <= before + 1e-15);
        break;
      }
    }
  }
}

TEST_CASE("cam_pixel_miou trivial and random cases match the oracle") {
  // one channel uniformly dominant -> whole image that class
  nd::Tensor maps(nd::Shape{3, 4, 4});
  for (std::size_t i = 0; i < 16; ++i) maps[1 * 16 + i] = 5.0;
  data::MaskImage mask(4, 4);
  for (auto& c : mask.classes) c = 1;
  CHECK(metrics::cam_pixel_miou(maps, mask).miou == 1.0);

  // evidence equal to one-hot of ground truth -> 1.0 (same resolution)
  nd::Rng rng(68);
  data::MaskImage truth(16, 16);
  for (auto& c : truth.classes) c = static_cast<std::uint8_t>(rng.below(3));
  nd::Tensor onehot(nd::Shape{3, 16, 16});
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) onehot[truth.at(x, y) * 256 + y * 16 + x] = 1.0;
  CHECK(metrics::cam_pixel_miou(onehot, truth).miou == 1.0);

  // random same-resolution case vs argmax+set oracle
  nd::Tensor evid(nd::Shape{3, 16, 16});
  oracles::fill_uniform(evid, rng);
  std::vector<std::uint8_t> pred_flat(256);
  for (int i = 0; i < 256; ++i) {
    int best = 0;
    for (int c = 1; c < 3; ++c)
      if (evid[c * 256 + i] > evid[best * 256 + i]) best = c;
    pred_flat[i] = static_cast<std::uint8_t>(best);
  }
  std::vector<std::uint8_t> truth_flat(truth.classes.begin(), truth.classes.end());
  const double want = oracles::set_miou(truth_flat, pred_flat, 3);
  CHECK(std::abs(metrics::cam_pixel_miou(evid, truth).miou - want) <= 1e-12);
}

TEST_CASE("scene order does not change metrics") {
  nd::Rng rng(69);
  std::vector<metrics::PatchScene> scenes;
  for (int s = 0; s < 6; ++s) {
    metrics::PatchScene ps;
    for (int j = 0; j < 9; ++j) {
      ps.truth.push_back(static_cast<std::uint8_t>(rng.below(4)));
      ps.pred.push_back(static_cast<std::uint8_t>(rng.below(4)));
    }
    scenes.push_back(std::move(ps));
  }
  const double a = metrics::patch_miou(scenes).miou;
  std::reverse(scenes.begin(), scenes.end());
  CHECK(metrics::patch_miou(scenes).miou == a);
}

TEST_CASE("aggregate statistics: mean and standard error") {
  CHECK(metrics::mean_of({1, 2, 3, 4, 5}) == 3.0);
  CHECK(metrics::standard_error({1, 2, 3, 4, 5}) == doctest::Approx(0.7071067811865476).epsilon(1e-12));
  CHECK(metrics::standard_error({2.5}) == 0.0);

  std::vector<metrics::MetricsReport> reports;
  for (double v : {1.0, 2.0, 3.0, 4.0, 5.0}) {
    metrics::MetricsReport r;
    r.config_id = "s2p-small-8";
    r.scene_rmse = v;
    r.scene_mae = v / 2;
    r.patch_miou = v / 10;
    reports.push_back(r);
  }
  auto rows = metrics::aggregate_reports(reports);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].n_runs == 5);
  CHECK(rows[0].rmse_mean == 3.0);
  CHECK(rows[0].rmse_se == doctest::Approx(0.7071067811865476).epsilon(1e-12));
  CHECK(*rows[0].patch_mean == doctest::Approx(0.3).epsilon(1e-12));
  CHECK_FALSE(rows[0].pixel_mean.has_value());
}

TEST_CASE("report CSV round trip") {
  metrics::MetricsReport r;
  r.config_id = "unet-224";
  r.scene_rmse = 0.125;
  r.scene_mae = 0.0625;
  r.pixel_miou = 0.25;
  const auto path = std::filesystem::temp_directory_path() / "lcc_report_test.csv";
  metrics::write_report_csv(path, r);
  metrics::MetricsReport back = metrics::read_report_csv(path);
  CHECK(back.config_id == "unet-224");
  CHECK(back.scene_rmse == 0.125);
  CHECK(back.scene_mae == 0.0625);
  CHECK_FALSE(back.patch_miou.has_value());
  CHECK(*back.pixel_miou == 0.25);
  std::filesystem::remove(path);
}
