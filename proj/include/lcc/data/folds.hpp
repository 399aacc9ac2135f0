#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lcc/data/manifest.hpp"

namespace lcc::data {

struct FoldSplit {
  int fold_index = 0;
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

/// Seeded shuffle, then the scene list is cut into 2*n_folds chunks; fold f
/// takes chunk f as test and the next chunk as validation, the rest as train.
/// For 5 folds this yields the 80/10/10 train/validation/test split.
std::vector<FoldSplit> make_folds(const DatasetManifest& manifest, int n_folds,
                                  std::uint64_t seed);

}  // namespace lcc::data
