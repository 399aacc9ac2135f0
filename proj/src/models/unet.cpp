#include "lcc/models/unet.hpp"

#include <cmath>
#include <stdexcept>

#include "lcc/data/bag.hpp"

namespace lcc::models {

namespace {

constexpr int kStages = 4;

nd::Tensor init_weight(nd::Shape shape, std::size_t fan_in, nd::Rng& rng) {
  nd::Tensor w(std::move(shape));
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (std::size_t i = 0; i < w.numel(); ++i) w[i] = rng.uniform(-bound, bound);
  return w;
}

int default_width(int input_px) { return input_px >= 448 ? 30 : 24; }

}  // namespace

void UNetConfig::validate() const {
  if (input_px != 224 && input_px != 448)
    throw std::invalid_argument("UNetConfig: input size must be 224 or 448, got " +
                                std::to_string(input_px));
  if (dropout_rate < 0.0 || dropout_rate >= 1.0)
    throw std::invalid_argument("UNetConfig: dropout rate must be in [0,1)");
  if (base_width < 0) throw std::invalid_argument("UNetConfig: negative base width");
}

UNetModel::UNetModel(const UNetConfig& config, std::uint64_t seed)
    : id_(config.id()), cfg_(config), dropout_rng_(0) {
  cfg_.validate();
  if (cfg_.base_width == 0) cfg_.base_width = default_width(cfg_.input_px);
  const std::size_t w = static_cast<std::size_t>(cfg_.base_width);

  nd::Rng init_rng(seed);
  const bool learned = cfg_.upsampling == Upsampling::LearnedConv;
  // 5 double-conv blocks down (incl. bottleneck) + 4 up + head, w/b pairs.
  params_.reserve(2 * (2 * (kStages + 1) + kStages + (learned ? kStages : 0) + 1));

  auto add_conv3 = [&](const std::string& name, std::size_t cin, std::size_t cout) {
    params_.emplace_back(name + ".w", init_weight({cout, cin, 3, 3}, cin * 9, init_rng));
    params_.emplace_back(name + ".b", nd::Tensor(nd::Shape{cout}));
  };
  auto add_block = [&](const std::string& name, std::size_t cin, std::size_t cout) {
    const std::size_t idx = params_.size();
    add_conv3(name + ".c1", cin, cout);
    add_conv3(name + ".c2", cout, cout);
    return idx;
  };

  // Encoder: w, 2w, 4w, 8w; bottleneck 16w.
  std::size_t cin = 3;
  for (int s = 0; s < kStages; ++s) {
    const std::size_t cout = w << s;
    enc_blocks_.push_back(add_block("enc" + std::to_string(s + 1), cin, cout));
    cin = cout;
  }
  bottleneck_ = add_block("bottleneck", cin, w << kStages);

  // Decoder, deepest first. Upsampling preserves channels, so each decoder
  // block sees deeper-channels + skip-channels in both upsampling modes.
  for (int s = kStages - 1; s >= 0; --s) {
    const std::size_t deep = w << (s + 1);
    const std::size_t skip = w << s;
    const std::string name = "dec" + std::to_string(s + 1);
    if (learned) {
      const std::size_t idx = params_.size();
      params_.emplace_back(name + ".up.w",
                           init_weight({deep, deep, 2, 2}, deep * 4, init_rng));
      params_.emplace_back(name + ".up.b", nd::Tensor(nd::Shape{deep}));
      up_convs_.push_back(idx);
    }
    dec_blocks_.push_back(add_block(name, deep + skip, skip));
  }

  head_ = params_.size();
  params_.emplace_back("head.w", init_weight({7, w}, w, init_rng));
  params_.emplace_back("head.b", nd::Tensor(nd::Shape{7}));

  dropout_rng_ = init_rng.fork(1);
}

nd::NodeRef UNetModel::block(nd::Tape& tape, const nd::NodeRef& in, std::size_t param_idx) {
  nd::NodeRef h = nd::conv2d(tape, in, params_[param_idx], params_[param_idx + 1], 1, 1);
  h = nd::relu(tape, h);
  h = nd::conv2d(tape, h, params_[param_idx + 2], params_[param_idx + 3], 1, 1);
  return nd::relu(tape, h);
}

ForwardNodes UNetModel::forward_nodes(nd::Tape& tape, const data::Bag& bag, bool training) {
  if (bag.patches.size() != 1)
    throw std::invalid_argument("unet_forward: expected a single-instance bag, got k=" +
                                std::to_string(bag.patches.size()));
  const auto& ps = bag.patches.front().shape();
  const auto S = static_cast<std::size_t>(cfg_.input_px);
  if (ps.size() != 3 || ps[1] != S || ps[2] != S)
    throw std::invalid_argument("unet_forward: input size mismatch for " + id_ + ": expected [3," +
                                std::to_string(S) + "," + std::to_string(S) + "], got " +
                                nd::shape_str(ps));

  nd::NodeRef x = tape.leaf(data::stack_patches(bag));

  std::vector<nd::NodeRef> skips;
  nd::NodeRef h = x;
  for (int s = 0; s < kStages; ++s) {
    h = block(tape, h, enc_blocks_[s]);
    if (s == kStages - 1 && training)
      h = nd::dropout(tape, h, cfg_.dropout_rate, training, dropout_rng_);
    skips.push_back(h);
    h = nd::maxpool2d(tape, h, 2, 2);
  }
  h = block(tape, h, bottleneck_);
  if (training) h = nd::dropout(tape, h, cfg_.dropout_rate, training, dropout_rng_);

  const bool learned = cfg_.upsampling == Upsampling::LearnedConv;
  for (int s = kStages - 1; s >= 0; --s) {
    const std::size_t d = static_cast<std::size_t>(kStages - 1 - s);
    if (learned) {
      const std::size_t u = up_convs_[d];
      h = nd::conv_transpose2x2(tape, h, params_[u], params_[u + 1]);
    } else {
      h = nd::upsample2x_bilinear(tape, h);
    }
    h = nd::concat_channels(tape, h, skips[s]);
    h = block(tape, h, dec_blocks_[d]);
  }

  nd::NodeRef pooled = nd::global_avg_pool(tape, h);  // [1, w]
  nd::NodeRef scene2d = nd::linear(tape, pooled, params_[head_], params_[head_ + 1]);  // [1,7]
  nd::NodeRef scene = nd::mean_over_instances(tape, scene2d);  // [7]
  return {scene, nullptr, h};
}

nd::Tensor UNetModel::evidence_maps_from(const nd::Tensor& feature_map) const {
  const auto& fs = feature_map.shape();
  if (fs.size() != 4 || fs[0] != 1)
    throw std::invalid_argument("evidence_maps_from: expected [1,Cf,H,W], got " +
                                nd::shape_str(fs));
  const std::size_t Cf = fs[1], H = fs[2], W = fs[3];
  const nd::Tensor& hw = params_[head_].value();   // [7, Cf]
  const nd::Tensor& hb = params_[head_ + 1].value();  // [7]
  if (hw.dim(1) != Cf)
    throw std::invalid_argument("evidence_maps_from: feature channels do not match head");

  nd::Tensor maps(nd::Shape{7, H, W});
  for (std::size_t c = 0; c < 7; ++c) {
    double* dst = maps.data() + c * H * W;
    for (std::size_t i = 0; i < H * W; ++i) dst[i] = hb[c];
    for (std::size_t f = 0; f < Cf; ++f) {
      const double wcf = hw[c * Cf + f];
      const double* src = feature_map.data() + f * H * W;
      for (std::size_t i = 0; i < H * W; ++i) dst[i] += wcf * src[i];
    }
  }
  return maps;
}

PredictionBundle UNetModel::predict(const data::Bag& bag, bool want_maps) {
  nd::Tape tape(false);
  ForwardNodes nodes = forward_nodes(tape, bag, false);
  PredictionBundle out;
  out.scene_pred = nodes.scene->value;
  if (want_maps) {
    out.evidence_maps = evidence_maps_from(nodes.feature_map->value);
    out.evidence_maps_weighted = out.evidence_maps;
    const std::size_t plane = out.evidence_maps.numel() / 7;
    for (std::size_t c = 0; c < 7; ++c) {
      double* dst = out.evidence_maps_weighted.data() + c * plane;
      for (std::size_t i = 0; i < plane; ++i) dst[i] *= out.scene_pred[c];
    }
  }
  return out;
}

std::vector<nd::Parameter*> UNetModel::parameters() {
  std::vector<nd::Parameter*> out;
  out.reserve(params_.size());
  for (nd::Parameter& p : params_) out.push_back(&p);
  return out;
}

UNetModel build_unet(const UNetConfig& config, std::uint64_t seed) {
  return UNetModel(config, seed);
}

}  // namespace lcc::models
