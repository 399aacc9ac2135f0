#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lcc/data/classes.hpp"

namespace lcc::data {

/// Length-7 nonnegative vector summing to 1: the scene-level coverage label
/// and the shape of scene predictions.
struct ClassProportions {
  std::array<double, kNumClasses> v{};

  double& operator[](int c) { return v[c]; }
  double operator[](int c) const { return v[c]; }

  double sum() const {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }

  void validate() const {
    for (int c = 0; c < kNumClasses; ++c)
      if (!(v[c] >= 0.0))
        throw std::invalid_argument("class proportion " + std::string(class_name(c)) +
                                    " is negative: " + std::to_string(v[c]));
    if (std::abs(sum() - 1.0) > 1e-9)
      throw std::invalid_argument("class proportions sum to " + std::to_string(sum()) +
                                  ", expected 1");
  }

  static ClassProportions one_hot(int c) {
    ClassProportions p;
    p.v[c] = 1.0;
    return p;
  }
};

}  // namespace lcc::data
