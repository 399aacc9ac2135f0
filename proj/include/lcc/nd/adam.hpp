#pragma once

#include <span>

#include "lcc/nd/parameter.hpp"

namespace lcc::nd {

struct AdamConfig {
  double lr = 1e-4;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One Adam update with bias correction. Weight decay enters as an L2 term
/// added to the gradient before the moment updates. Gradient accumulators
/// are zeroed afterwards.
void adam_step(std::span<Parameter* const> params, const AdamConfig& cfg);

}  // namespace lcc::nd
