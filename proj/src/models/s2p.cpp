#include "lcc/models/s2p.hpp"

#include <cmath>
#include <stdexcept>

#include "lcc/data/bag.hpp"

namespace lcc::models {

namespace {

const char* patch_class_name(PatchClass pc) {
  switch (pc) {
    case PatchClass::Small: return "small";
    case PatchClass::Medium: return "medium";
    case PatchClass::Large: return "large";
  }
  return "?";
}

nd::Tensor init_weight(nd::Shape shape, std::size_t fan_in, nd::Rng& rng) {
  nd::Tensor w(std::move(shape));
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (std::size_t i = 0; i < w.numel(); ++i) w[i] = rng.uniform(-bound, bound);
  return w;
}

}  // namespace

std::string S2PConfig::id() const {
  return "s2p-" + std::string(patch_class_name(patch_class)) + "-" + std::to_string(grid_size);
}

void S2PConfig::validate() const {
  if (grid_size != 8 && grid_size != 16 && grid_size != 24)
    throw std::invalid_argument("S2PConfig: grid size must be 8, 16 or 24, got " +
                                std::to_string(grid_size));
  if (dropout_rate < 0.0 || dropout_rate >= 1.0)
    throw std::invalid_argument("S2PConfig: dropout rate must be in [0,1)");
  if (num_classes != 7) throw std::invalid_argument("S2PConfig: class count must be 7");
}

std::size_t S2PArch::flatten_dim() const {
  std::size_t s = static_cast<std::size_t>(input_px);
  std::size_t ch = 3;
  for (const ConvSpec& c : convs) {
    s = s - c.kernel + 1;   // conv, stride 1, no padding
    s = (s - 2) / 2 + 1;    // maxpool 2,2
    ch = c.out_ch;
  }
  return ch * s * s;
}

S2PArch s2p_arch(PatchClass pc) {
  S2PArch a;
  a.input_px = patch_px_for(pc);
  a.convs = {{3, 36, 4}, {36, 48, 3}};
  if (pc == PatchClass::Large) a.convs.push_back({48, 56, 3});
  a.fc_dims = {512, 128, 64, 7};
  return a;
}

S2PArch scene_baseline_arch() {
  S2PArch a = s2p_arch(PatchClass::Large);
  a.input_px = 224;
  return a;
}

S2PModel::S2PModel(std::string config_id, S2PArch arch, double dropout_rate, int grid_size,
                   std::uint64_t seed, bool scene_only)
    : id_(std::move(config_id)),
      arch_(std::move(arch)),
      dropout_rate_(dropout_rate),
      grid_size_(grid_size),
      scene_only_(scene_only),
      dropout_rng_(0) {
  nd::Rng init_rng(seed);
  params_.reserve(2 * (arch_.convs.size() + arch_.fc_dims.size()));

  for (std::size_t i = 0; i < arch_.convs.size(); ++i) {
    const ConvSpec& c = arch_.convs[i];
    const std::size_t fan_in = c.in_ch * c.kernel * c.kernel;
    const std::string base = "conv" + std::to_string(i + 1);
    params_.emplace_back(base + ".w",
                         init_weight({c.out_ch, c.in_ch, static_cast<std::size_t>(c.kernel),
                                      static_cast<std::size_t>(c.kernel)},
                                     fan_in, init_rng));
    params_.emplace_back(base + ".b", nd::Tensor(nd::Shape{c.out_ch}));
  }
  std::size_t in_dim = arch_.flatten_dim();
  for (std::size_t i = 0; i < arch_.fc_dims.size(); ++i) {
    const std::size_t out_dim = arch_.fc_dims[i];
    const std::string base = "fc" + std::to_string(i + 1);
    params_.emplace_back(base + ".w", init_weight({out_dim, in_dim}, in_dim, init_rng));
    params_.emplace_back(base + ".b", nd::Tensor(nd::Shape{out_dim}));
    in_dim = out_dim;
  }
  dropout_rng_ = init_rng.fork(1);
}

nd::NodeRef S2PModel::forward_batch(nd::Tape& tape, const nd::NodeRef& input, bool training,
                                    std::vector<ShapeTraceEntry>* trace) {
  auto note = [&](const char* op, const nd::NodeRef& n) {
    if (trace) trace->push_back({op, n->value.shape()});
  };

  nd::NodeRef h = input;
  std::size_t p = 0;
  for (std::size_t i = 0; i < arch_.convs.size(); ++i) {
    h = nd::conv2d(tape, h, params_[p], params_[p + 1], 1, 0);
    p += 2;
    note(("conv" + std::to_string(i + 1)).c_str(), h);
    h = nd::relu(tape, h);
    h = nd::maxpool2d(tape, h, 2, 2);
    note(("pool" + std::to_string(i + 1)).c_str(), h);
  }
  h = nd::flatten2d(tape, h);
  note("flatten", h);
  const std::size_t n_fc = arch_.fc_dims.size();
  for (std::size_t i = 0; i < n_fc; ++i) {
    h = nd::linear(tape, h, params_[p], params_[p + 1]);
    p += 2;
    note(("fc" + std::to_string(i + 1)).c_str(), h);
    if (i + 1 < n_fc) {  // the final 7-output layer stays linear
      h = nd::relu(tape, h);
      h = nd::dropout(tape, h, dropout_rate_, training, dropout_rng_);
    }
  }
  return h;
}

ForwardNodes S2PModel::forward_nodes(nd::Tape& tape, const data::Bag& bag, bool training) {
  if (bag.patches.empty()) throw std::invalid_argument("s2p_forward: empty bag " + bag.scene_id);
  const auto& ps = bag.patches.front().shape();
  if (ps.size() != 3 || ps[1] != static_cast<std::size_t>(arch_.input_px) ||
      ps[2] != static_cast<std::size_t>(arch_.input_px))
    throw std::invalid_argument("s2p_forward: patch size mismatch for " + id_ + ": expected [3," +
                                std::to_string(arch_.input_px) + "," +
                                std::to_string(arch_.input_px) + "], got " + nd::shape_str(ps));

  nd::NodeRef x = tape.leaf(data::stack_patches(bag));
  nd::NodeRef preds = forward_batch(tape, x, training);
  nd::NodeRef scene = nd::mean_over_instances(tape, preds);
  return {scene, scene_only_ ? nullptr : preds, nullptr};
}

PredictionBundle S2PModel::predict(const data::Bag& bag, bool) {
  nd::Tape tape(false);
  ForwardNodes nodes = forward_nodes(tape, bag, false);
  PredictionBundle out;
  out.scene_pred = nodes.scene->value;
  if (nodes.patch_preds) out.patch_preds = nodes.patch_preds->value;
  return out;
}

std::vector<nd::Parameter*> S2PModel::parameters() {
  std::vector<nd::Parameter*> out;
  out.reserve(params_.size());
  for (nd::Parameter& p : params_) out.push_back(&p);
  return out;
}

S2PModel build_s2p(const S2PConfig& config, std::uint64_t seed) {
  config.validate();
  return S2PModel(config.id(), s2p_arch(config.patch_class), config.dropout_rate,
                  config.grid_size, seed, false);
}

S2PModel build_scene_baseline(double dropout_rate, std::uint64_t seed) {
  return S2PModel("scene-baseline", scene_baseline_arch(), dropout_rate, 1, seed, true);
}

}  // namespace lcc::models
