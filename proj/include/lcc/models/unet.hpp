#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lcc/models/model.hpp"
#include "lcc/nd/rng.hpp"

namespace lcc::models {

enum class Upsampling { FixedBilinear, LearnedConv };

struct UNetConfig {
  int input_px = 224;  // 224 or 448
  Upsampling upsampling = Upsampling::FixedBilinear;
  int base_width = 0;  // 0 = default for the input size
  double dropout_rate = 0.0;

  std::string id() const { return "unet-" + std::to_string(input_px); }
  void validate() const;
};

/// Four-stage encoder/decoder with skip concatenation. The decoder output F
/// matches the input spatial size; the scene prediction is a linear layer on
/// globally average-pooled F, and per-class evidence maps are recovered as
/// M_c = W_c F + B_c from that layer's weights.
class UNetModel : public Model {
 public:
  UNetModel(const UNetConfig& config, std::uint64_t seed);

  const std::string& config_id() const override { return id_; }
  BagGeometry geometry() const override { return {1, cfg_.input_px}; }
  ForwardNodes forward_nodes(nd::Tape& tape, const data::Bag& bag, bool training) override;
  PredictionBundle predict(const data::Bag& bag, bool want_maps = false) override;
  std::vector<nd::Parameter*> parameters() override;

  const UNetConfig& config() const { return cfg_; }

  /// M_c = W_c F + B_c over a feature map value [1,Cf,H,W] -> [7,H,W].
  nd::Tensor evidence_maps_from(const nd::Tensor& feature_map) const;

 private:
  nd::NodeRef block(nd::Tape& tape, const nd::NodeRef& in, std::size_t param_idx);

  std::string id_;
  UNetConfig cfg_;
  std::vector<nd::Parameter> params_;
  // Parameter layout indices (w/b pairs): enc blocks, bottleneck, per-level
  // up-convs (learned mode only), dec blocks, then the classification head.
  std::vector<std::size_t> enc_blocks_, dec_blocks_, up_convs_;
  std::size_t bottleneck_ = 0, head_ = 0;
  nd::Rng dropout_rng_;
};

UNetModel build_unet(const UNetConfig& config, std::uint64_t seed);

}  // namespace lcc::models
