#include "lcc/nd/adam.hpp"

#include <cmath>

namespace lcc::nd {

void adam_step(std::span<Parameter* const> params, const AdamConfig& cfg) {
  for (Parameter* p : params) {
    p->bump_step();
    const double t = static_cast<double>(p->step_count());
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    Tensor& value = p->value();
    Tensor& grad = p->grad();
    Tensor& m = p->adam_m();
    Tensor& v = p->adam_v();
    const std::size_t n = value.numel();
    for (std::size_t i = 0; i < n; ++i) {
      const double g = grad[i] + cfg.weight_decay * value[i];
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
      value[i] -= cfg.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.eps);
      grad[i] = 0.0;
    }
  }
}

}  // namespace lcc::nd
