#include "lcc/data/folds.hpp"

#include <stdexcept>

#include "lcc/nd/rng.hpp"

namespace lcc::data {

std::vector<FoldSplit> make_folds(const DatasetManifest& manifest, int n_folds,
                                  std::uint64_t seed) {
  if (n_folds < 1) throw std::invalid_argument("make_folds: n_folds must be >= 1");
  const std::size_t n = manifest.entries.size();
  if (n < static_cast<std::size_t>(n_folds))
    throw std::invalid_argument("make_folds: need at least " + std::to_string(n_folds) +
                                " scenes, have " + std::to_string(n));

  std::vector<std::string> ids;
  ids.reserve(n);
  for (const auto& e : manifest.entries) ids.push_back(e.scene_id);
  nd::Rng rng(seed);
  rng.shuffle(ids);

  // Chunk boundaries: 2*n_folds chunks, earlier chunks absorb the remainder.
  const std::size_t n_chunks = 2 * static_cast<std::size_t>(n_folds);
  std::vector<std::size_t> starts(n_chunks + 1, 0);
  const std::size_t base = n / n_chunks;
  const std::size_t extra = n % n_chunks;
  for (std::size_t i = 0; i < n_chunks; ++i)
    starts[i + 1] = starts[i] + base + (i < extra ? 1 : 0);

  auto chunk = [&](std::size_t i) {
    return std::vector<std::string>(ids.begin() + starts[i], ids.begin() + starts[i + 1]);
  };

  std::vector<FoldSplit> folds;
  folds.reserve(n_folds);
  for (int f = 0; f < n_folds; ++f) {
    FoldSplit split;
    split.fold_index = f;
    const std::size_t test_chunk = static_cast<std::size_t>(f);
    const std::size_t val_chunk = (test_chunk + 1) % n_chunks;
    split.test = chunk(test_chunk);
    split.validation = chunk(val_chunk);
    for (std::size_t i = 0; i < n_chunks; ++i)
      if (i != test_chunk && i != val_chunk)
        for (std::size_t j = starts[i]; j < starts[i + 1]; ++j) split.train.push_back(ids[j]);
    folds.push_back(std::move(split));
  }
  return folds;
}

}  // namespace lcc::data
