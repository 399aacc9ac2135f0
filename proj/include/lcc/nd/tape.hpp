#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lcc/nd/tensor.hpp"

namespace lcc::nd {

/// A value produced during a taped forward pass. The gradient buffer is
/// allocated lazily during backward.
struct Node {
  explicit Node(Tensor v) : value(std::move(v)) {}

  Tensor value;
  Tensor grad;

  Tensor& ensure_grad() {
    if (grad.empty()) grad = Tensor(value.shape());
    return grad;
  }
  bool has_grad() const noexcept { return !grad.empty(); }
};

using NodeRef = std::shared_ptr<Node>;

inline NodeRef make_node(Tensor v) { return std::make_shared<Node>(std::move(v)); }

/// Ordered record of executed operations; replaying it in reverse propagates
/// gradients from a scalar loss to every node and parameter that fed it.
///
/// A tape constructed with grad_enabled=false records nothing, for
/// inference-only forward passes.
class Tape {
 public:
  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

  bool recording() const noexcept { return grad_enabled_; }

  NodeRef leaf(Tensor v) const { return make_node(std::move(v)); }

  void record(std::function<void()> backward_step) {
    if (!grad_enabled_) return;
    if (consumed_)
      throw std::logic_error("tape already consumed by backward(); reset() before recording");
    steps_.push_back(std::move(backward_step));
  }

  /// Fills gradients for everything reachable from `loss`. Each recorded
  /// operation is visited exactly once, in reverse execution order.
  void backward(const NodeRef& loss) {
    if (!grad_enabled_) throw std::logic_error("backward() on a non-recording tape");
    if (consumed_)
      throw std::logic_error("backward() called twice without a new forward; reset() the tape");
    if (!loss) throw std::invalid_argument("backward() on null node");
    if (loss->value.numel() != 1)
      throw std::invalid_argument("backward() requires a scalar loss, got shape " +
                                  shape_str(loss->value.shape()));
    loss->ensure_grad();
    loss->grad[0] = 1.0;
    replayed_ = 0;
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
      (*it)();
      ++replayed_;
    }
    consumed_ = true;
  }

  void reset() {
    steps_.clear();
    consumed_ = false;
    replayed_ = 0;
  }

  std::size_t num_ops() const noexcept { return steps_.size(); }
  std::size_t replayed_ops() const noexcept { return replayed_; }
  bool consumed() const noexcept { return consumed_; }

 private:
  std::vector<std::function<void()>> steps_;
  bool grad_enabled_;
  bool consumed_ = false;
  std::size_t replayed_ = 0;
};

}  // namespace lcc::nd
