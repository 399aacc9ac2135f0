#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lcc/models/model.hpp"
#include "lcc/nd/rng.hpp"

namespace lcc::models {

enum class PatchClass { Small, Medium, Large };

inline int patch_px_for(PatchClass pc) {
  switch (pc) {
    case PatchClass::Small: return 28;
    case PatchClass::Medium: return 56;
    case PatchClass::Large: return 102;
  }
  return 0;
}

struct S2PConfig {
  PatchClass patch_class = PatchClass::Small;
  int grid_size = 8;  // 8, 16 or 24
  double dropout_rate = 0.0;
  int num_classes = 7;

  int patch_px() const { return patch_px_for(patch_class); }
  std::string id() const;
  void validate() const;
};

struct ConvSpec {
  std::size_t in_ch;
  std::size_t out_ch;
  int kernel;  // stride 1, no padding; each conv is followed by ReLU + MaxPool(2,2)
};

/// Layer plan for an S2P-style per-instance network.
struct S2PArch {
  int input_px = 0;
  std::vector<ConvSpec> convs;
  std::vector<std::size_t> fc_dims;  // hidden widths then the output width

  std::size_t flatten_dim() const;
};

/// The conv/FC stack for a patch class, exactly as tabulated:
///   Small  (28):  Conv(3->36,k4) P2 Conv(36->48,k3) P2 -> 1200 -> 512/128/64/7
///   Medium (56):  same convs on 56px -> 6912 -> 512/128/64/7
///   Large (102):  adds Conv(48->56,k3) P2 -> 5600 -> 512/128/64/7
/// ReLU after every conv; ReLU + dropout after every hidden FC; the final
/// 7-output layer is linear.
S2PArch s2p_arch(PatchClass pc);

/// The Large trunk applied to the whole scene resized to 224px (grid size 1).
S2PArch scene_baseline_arch();

struct ShapeTraceEntry {
  std::string op;
  nd::Shape shape;
};

/// Instance-space MIL network: every patch goes through the same stack and
/// the scene prediction is the mean of the patch predictions.
class S2PModel : public Model {
 public:
  S2PModel(std::string config_id, S2PArch arch, double dropout_rate, int grid_size,
           std::uint64_t seed, bool scene_only);

  const std::string& config_id() const override { return id_; }
  BagGeometry geometry() const override { return {grid_size_, arch_.input_px}; }

  /// Shared per-instance stack over stacked patches [k,3,P,P] -> [k,7].
  nd::NodeRef forward_batch(nd::Tape& tape, const nd::NodeRef& input, bool training,
                            std::vector<ShapeTraceEntry>* trace = nullptr);

  ForwardNodes forward_nodes(nd::Tape& tape, const data::Bag& bag, bool training) override;
  PredictionBundle predict(const data::Bag& bag, bool want_maps = false) override;
  std::vector<nd::Parameter*> parameters() override;

  const S2PArch& arch() const { return arch_; }

 private:
  std::string id_;
  S2PArch arch_;
  double dropout_rate_;
  int grid_size_;
  bool scene_only_;
  std::vector<nd::Parameter> params_;  // conv w/b pairs then fc w/b pairs
  nd::Rng dropout_rng_;
};

S2PModel build_s2p(const S2PConfig& config, std::uint64_t seed);
S2PModel build_scene_baseline(double dropout_rate, std::uint64_t seed);

}  // namespace lcc::models
