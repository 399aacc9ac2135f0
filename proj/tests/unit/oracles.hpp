#pragma once

// Independent oracles used by the tests: central finite differences for
// gradients, brute-force pixel counting for labels, and set-based IoU.
// These deliberately avoid the library's own computation paths.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "lcc/data/mask.hpp"
#include "lcc/nd/rng.hpp"
#include "lcc/nd/tensor.hpp"

namespace oracles {

// ---- gradients ----

struct FdReport {
  double max_rel_err = 0.0;
  std::size_t checked = 0;
};

/// Central finite differences over the given slots. `forward` must recompute
/// the scalar loss from the current buffer contents. Relative error uses
/// max(1, |analytic|, |numeric|) as the denominator.
inline FdReport finite_diff_check(const std::function<double()>& forward,
                                  std::span<double* const> slots,
                                  std::span<const double> analytic, double h = 1e-5) {
  FdReport report;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    double* x = slots[i];
    const double saved = *x;
    *x = saved + h;
    const double fp = forward();
    *x = saved - h;
    const double fm = forward();
    *x = saved;
    const double numeric = (fp - fm) / (2.0 * h);
    const double denom = std::max({1.0, std::abs(numeric), std::abs(analytic[i])});
    const double rel = std::abs(numeric - analytic[i]) / denom;
    report.max_rel_err = std::max(report.max_rel_err, rel);
    ++report.checked;
  }
  return report;
}

/// Uniform values bounded away from zero, for ReLU-kink-free inputs.
inline void fill_away_from_zero(lcc::nd::Tensor& t, lcc::nd::Rng& rng, double lo = 0.1,
                                double hi = 1.0) {
  for (std::size_t i = 0; i < t.numel(); ++i) {
    const double mag = rng.uniform(lo, hi);
    t[i] = rng.bernoulli(0.5) ? mag : -mag;
  }
}

inline void fill_uniform(lcc::nd::Tensor& t, lcc::nd::Rng& rng, double lo = -1.0,
                         double hi = 1.0) {
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform(lo, hi);
}

/// Widens the margin between the top two values of every pooling window so a
/// +-h perturbation cannot flip the argmax.
inline void separate_pool_ties(lcc::nd::Tensor& t, int kernel, int stride,
                               double margin = 1e-2) {
  const auto& s = t.shape();
  const std::size_t H = s[2], W = s[3];
  const std::size_t Hout = (H - kernel) / stride + 1;
  const std::size_t Wout = (W - kernel) / stride + 1;
  for (std::size_t plane = 0; plane < s[0] * s[1]; ++plane) {
    double* p = t.data() + plane * H * W;
    for (std::size_t y = 0; y < Hout; ++y) {
      for (std::size_t x = 0; x < Wout; ++x) {
        std::size_t best = (y * stride) * W + x * stride;
        for (int dy = 0; dy < kernel; ++dy)
          for (int dx = 0; dx < kernel; ++dx) {
            const std::size_t idx = (y * stride + dy) * W + x * stride + dx;
            if (p[idx] > p[best]) best = idx;
          }
        double second = -1e300;
        for (int dy = 0; dy < kernel; ++dy)
          for (int dx = 0; dx < kernel; ++dx) {
            const std::size_t idx = (y * stride + dy) * W + x * stride + dx;
            if (idx != best) second = std::max(second, p[idx]);
          }
        if (p[best] - second < margin) p[best] = second + margin;
      }
    }
  }
}

// ---- counting / segmentation oracles ----

/// Per-pixel counting, independent of compute_proportions.
inline std::vector<double> count_proportions(const lcc::data::MaskImage& mask) {
  std::vector<std::int64_t> counts(lcc::data::kNumClasses, 0);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) ++counts[mask.at(x, y)];
  std::vector<double> out(lcc::data::kNumClasses);
  for (int c = 0; c < lcc::data::kNumClasses; ++c)
    out[c] = double(counts[c]) / (double(mask.width) * mask.height);
  return out;
}

/// Histogram argmax per cell, lowest index on ties.
inline std::vector<int> majority_per_cell(const lcc::data::MaskImage& mask, int grid) {
  const int cw = mask.width / grid, ch = mask.height / grid;
  std::vector<int> out;
  for (int gy = 0; gy < grid; ++gy)
    for (int gx = 0; gx < grid; ++gx) {
      std::map<int, int> hist;
      for (int y = 0; y < ch; ++y)
        for (int x = 0; x < cw; ++x) ++hist[mask.at(gx * cw + x, gy * ch + y)];
      int best = -1, best_n = -1;
      for (auto [cls, n] : hist)
        if (n > best_n) {
          best = cls;
          best_n = n;
        }
      out.push_back(best);
    }
  return out;
}

/// Set-based mIoU: materializes the unit-index set of each class for truth
/// and prediction, then |A inter B| / |A union B|; classes with an empty
/// union are skipped.
inline double set_miou(std::span<const std::uint8_t> truth, std::span<const std::uint8_t> pred,
                       int n_classes) {
  double sum = 0.0;
  int included = 0;
  for (int c = 0; c < n_classes; ++c) {
    std::set<std::size_t> t, p;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (truth[i] == c) t.insert(i);
      if (pred[i] == c) p.insert(i);
    }
    std::set<std::size_t> inter, uni;
    for (std::size_t i : t)
      if (p.count(i)) inter.insert(i);
    uni = t;
    uni.insert(p.begin(), p.end());
    if (uni.empty()) continue;
    sum += double(inter.size()) / double(uni.size());
    ++included;
  }
  return sum / included;
}

}  // namespace oracles
