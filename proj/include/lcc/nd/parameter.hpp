#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "lcc/nd/tensor.hpp"

namespace lcc::nd {

/// Trainable weight with its gradient accumulator and Adam moment buffers.
/// grad/adam buffers are materialized on first use so evaluation-only models
/// carry just the values.
class Parameter {
 public:
  Parameter(std::string name, Tensor init) : name_(std::move(name)), value_(std::move(init)) {}

  const std::string& name() const noexcept { return name_; }
  Tensor& value() noexcept { return value_; }
  const Tensor& value() const noexcept { return value_; }

  Tensor& grad() {
    if (grad_.empty()) grad_ = Tensor(value_.shape());
    return grad_;
  }
  bool has_grad() const noexcept { return !grad_.empty(); }

  Tensor& adam_m() {
    if (adam_m_.empty()) adam_m_ = Tensor(value_.shape());
    return adam_m_;
  }
  Tensor& adam_v() {
    if (adam_v_.empty()) adam_v_ = Tensor(value_.shape());
    return adam_v_;
  }

  std::uint64_t step_count() const noexcept { return step_count_; }
  void bump_step() noexcept { ++step_count_; }

  void zero_grad() {
    if (!grad_.empty()) grad_.zero();
  }

 private:
  std::string name_;
  Tensor value_;
  Tensor grad_;
  Tensor adam_m_;
  Tensor adam_v_;
  std::uint64_t step_count_ = 0;
};

}  // namespace lcc::nd
