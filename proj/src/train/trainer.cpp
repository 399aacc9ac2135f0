#include "lcc/train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "lcc/nd/rng.hpp"

namespace lcc::train {

namespace {

nd::Tensor label_tensor(const data::ClassProportions& label) {
  nd::Tensor t(nd::Shape{data::kNumClasses});
  for (int c = 0; c < data::kNumClasses; ++c) t[c] = label[c];
  return t;
}

std::vector<nd::Tensor> snapshot(models::Model& model) {
  std::vector<nd::Tensor> values;
  for (nd::Parameter* p : model.parameters()) values.push_back(p->value());
  return values;
}

void restore(models::Model& model, const std::vector<nd::Tensor>& values) {
  auto params = model.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value() = values[i];
}

}  // namespace

void TrainConfig::validate() const {
  if (patience < 1) throw std::invalid_argument("TrainConfig: patience must be >= 1");
  if (max_epochs < patience)
    throw std::invalid_argument("TrainConfig: max_epochs must be >= patience");
}

SceneMetrics evaluate_scene(models::Model& model, std::span<const data::Bag> bags) {
  if (bags.empty()) throw std::invalid_argument("evaluate_scene: empty bag set");
  double rmse_sum = 0.0, mae_sum = 0.0;
  for (const data::Bag& bag : bags) {
    models::PredictionBundle bundle = model.predict(bag);
    double sq = 0.0, ab = 0.0;
    for (int c = 0; c < data::kNumClasses; ++c) {
      const double d = bundle.scene_pred[c] - bag.label[c];
      sq += d * d;
      ab += std::abs(d);
    }
    rmse_sum += std::sqrt(sq / data::kNumClasses);
    mae_sum += ab / data::kNumClasses;
  }
  const double n = static_cast<double>(bags.size());
  return {rmse_sum / n, mae_sum / n};
}

TrainLog train_model(models::Model& model, std::span<const data::Bag> train_bags,
                     std::span<const data::Bag> val_bags, const TrainConfig& config,
                     const ValidationFn& validation) {
  config.validate();
  if (train_bags.empty()) throw std::invalid_argument("train_model: empty training set");
  if (val_bags.empty()) throw std::invalid_argument("train_model: empty validation set");

  const ValidationFn val_fn = validation
                                  ? validation
                                  : [](models::Model& m, std::span<const data::Bag> bags) {
                                      return evaluate_scene(m, bags).rmse;
                                    };

  const nd::AdamConfig adam{config.lr, config.weight_decay, config.beta1, config.beta2,
                            config.eps};
  std::vector<nd::Parameter*> params = model.parameters();
  nd::Rng shuffle_rng(config.seed);

  std::vector<std::size_t> order(train_bags.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainLog log;
  double best = std::numeric_limits<double>::infinity();
  std::vector<nd::Tensor> best_weights;
  int bad_streak = 0;

  nd::Tape tape;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    for (std::size_t i : order) {
      const data::Bag& bag = train_bags[i];
      tape.reset();
      models::ForwardNodes nodes = model.forward_nodes(tape, bag, true);
      nd::NodeRef loss = nd::rmse_loss(tape, nodes.scene, label_tensor(bag.label));
      const double loss_value = loss->value[0];
      if (!std::isfinite(loss_value))
        throw std::runtime_error("train_model: non-finite loss at epoch " +
                                 std::to_string(epoch) + ", bag " + bag.scene_id);
      tape.backward(loss);
      nd::adam_step(params, adam);
      loss_sum += loss_value;
    }
    tape.reset();

    const double val_rmse = val_fn(model, val_bags);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log.epochs.push_back(
        {epoch, loss_sum / static_cast<double>(train_bags.size()), val_rmse, seconds});

    if (val_rmse < best) {  // strict decrease resets the patience counter
      best = val_rmse;
      log.best_epoch = epoch;
      best_weights = snapshot(model);
      bad_streak = 0;
    } else {
      ++bad_streak;
    }
    if (bad_streak >= config.patience) {
      log.stop_reason = "patience";
      break;
    }
  }
  if (log.stop_reason.empty()) log.stop_reason = "max-epochs";
  log.best_val_rmse = best;
  restore(model, best_weights);
  return log;
}

void write_train_log_csv(const std::filesystem::path& path, const TrainLog& log) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("train log: cannot write " + path.string());
  os << "epoch,train_loss,val_rmse,seconds\n";
  char buf[96];
  for (const EpochRecord& e : log.epochs) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.3f\n", e.epoch, e.train_loss, e.val_rmse,
                  e.seconds);
    os << buf;
  }
  os << "# best_epoch=" << log.best_epoch << " best_val_rmse=" << log.best_val_rmse
     << " stop_reason=" << log.stop_reason << "\n";
}

}  // namespace lcc::train
