#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lcc/data/bag.hpp"
#include "lcc/nd/ops.hpp"
#include "lcc/nd/tape.hpp"

namespace lcc::models {

/// Joint output of one forward pass. Scene predictions are raw regression
/// outputs: entries may be negative or exceed 1 and are never clamped.
struct PredictionBundle {
  nd::Tensor scene_pred;              // [7]
  nd::Tensor patch_preds;             // [k,7]; empty for scene-only models
  nd::Tensor evidence_maps;           // [7,H,W] unweighted; UNet only
  nd::Tensor evidence_maps_weighted;  // [7,H,W], scaled by scene_pred per class
};

/// Live nodes from a taped forward pass, for training.
struct ForwardNodes {
  nd::NodeRef scene;        // [7]
  nd::NodeRef patch_preds;  // [k,7] or null
  nd::NodeRef feature_map;  // UNet final feature map or null
};

struct BagGeometry {
  int grid_size = 1;
  int patch_px = 0;
};

class Model {
 public:
  virtual ~Model() = default;

  virtual const std::string& config_id() const = 0;
  virtual BagGeometry geometry() const = 0;
  virtual ForwardNodes forward_nodes(nd::Tape& tape, const data::Bag& bag, bool training) = 0;
  virtual PredictionBundle predict(const data::Bag& bag, bool want_maps = false) = 0;
  virtual std::vector<nd::Parameter*> parameters() = 0;

  std::size_t parameter_count() {
    std::size_t n = 0;
    for (const nd::Parameter* p : parameters()) n += p->value().numel();
    return n;
  }
};

}  // namespace lcc::models
