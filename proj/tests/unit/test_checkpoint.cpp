#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lcc/nd/checkpoint.hpp"
#include "lcc/nd/rng.hpp"
#include "oracles.hpp"

using namespace lcc;

TEST_CASE("checkpoint round-trips names, shapes, payload and config id") {
  nd::Rng rng(55);
  nd::Tensor a(nd::Shape{3, 4});
  nd::Tensor b(nd::Shape{7});
  oracles::fill_uniform(a, rng);
  oracles::fill_uniform(b, rng);

  const auto path = std::filesystem::temp_directory_path() / "lcc_ckpt_test.bin";
  nd::save_checkpoint(path, "s2p-small-8", {{"layer.w", &a}, {"layer.b", &b}});

  nd::Checkpoint ckpt = nd::load_checkpoint(path);
  CHECK(ckpt.format_version == 1);
  CHECK(ckpt.config_id == "s2p-small-8");
  REQUIRE(ckpt.entries.count("layer.w") == 1);
  REQUIRE(ckpt.entries.count("layer.b") == 1);
  CHECK(ckpt.entries.at("layer.w").shape() == a.shape());
  for (std::size_t i = 0; i < a.numel(); ++i) CHECK(ckpt.entries.at("layer.w")[i] == a[i]);
  for (std::size_t i = 0; i < b.numel(); ++i) CHECK(ckpt.entries.at("layer.b")[i] == b[i]);
  std::filesystem::remove(path);
}

TEST_CASE("checkpoint loader rejects garbage") {
  const auto path = std::filesystem::temp_directory_path() / "lcc_ckpt_bad.bin";
  {
    std::ofstream os(path, std::ios::binary);
    os << "not a checkpoint";
  }
  CHECK_THROWS_AS(nd::load_checkpoint(path), std::runtime_error);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(nd::load_checkpoint(path), std::runtime_error);  // missing file
}
