#include <doctest.h>

#include <cmath>

#include "lcc/nd/ops.hpp"
#include "lcc/nd/rng.hpp"
#include "oracles.hpp"

using namespace lcc;

namespace {

nd::Parameter rand_param(const char* name, nd::Shape shape, nd::Rng& rng) {
  nd::Tensor t(std::move(shape));
  oracles::fill_uniform(t, rng);
  return nd::Parameter(name, std::move(t));
}

}  // namespace

TEST_CASE("conv2d shape algebra matches the tabulated layers") {
  nd::Rng rng(11);
  nd::Tape tape(false);

  // b x 3 x 28 x 28, K=4 -> b x 36 x 25 x 25
  {
    nd::Parameter w = rand_param("w", {36, 3, 4, 4}, rng);
    nd::Parameter b = rand_param("b", {36}, rng);
    nd::NodeRef in = tape.leaf(nd::Tensor(nd::Shape{2, 3, 28, 28}));
    nd::NodeRef out = nd::conv2d(tape, in, w, b, 1, 0);
    CHECK(out->value.shape() == nd::Shape{2, 36, 25, 25});
  }
  // b x 36 x 26 x 26, K=3 -> b x 48 x 24 x 24
  {
    nd::Parameter w = rand_param("w", {48, 36, 3, 3}, rng);
    nd::Parameter b = rand_param("b", {48}, rng);
    nd::NodeRef in = tape.leaf(nd::Tensor(nd::Shape{2, 36, 26, 26}));
    nd::NodeRef out = nd::conv2d(tape, in, w, b, 1, 0);
    CHECK(out->value.shape() == nd::Shape{2, 48, 24, 24});
  }
}

TEST_CASE("conv2d identity kernel passes the input through") {
  nd::Tape tape(false);
  nd::Parameter w("w", nd::Tensor(nd::Shape{1, 1, 1, 1}, {1.0}));
  nd::Parameter b("b", nd::Tensor(nd::Shape{1}, {0.0}));
  nd::NodeRef in = tape.leaf(nd::Tensor(nd::Shape{1, 1, 1, 1}, {3.25}));
  nd::NodeRef out = nd::conv2d(tape, in, w, b, 1, 0);
  CHECK(out->value.shape() == nd::Shape{1, 1, 1, 1});
  CHECK(out->value[0] == doctest::Approx(3.25).epsilon(1e-15));
}

TEST_CASE("conv2d rejects a channel mismatch naming both shapes") {
  nd::Rng rng(3);
  nd::Tape tape(false);
  nd::Parameter w = rand_param("w", {8, 4, 3, 3}, rng);
  nd::Parameter b = rand_param("b", {8}, rng);
  nd::NodeRef in = tape.leaf(nd::Tensor(nd::Shape{1, 3, 10, 10}));
  try {
    nd::conv2d(tape, in, w, b, 1, 0);
    FAIL("expected dimension error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("[1,3,10,10]") != std::string::npos);
    CHECK(msg.find("[8,4,3,3]") != std::string::npos);
  }
}

TEST_CASE("conv2d rejects kernels larger than the padded input") {
  nd::Rng rng(4);
  nd::Tape tape(false);
  nd::Parameter w = rand_param("w", {2, 1, 5, 5}, rng);
  nd::Parameter b = rand_param("b", {2}, rng);
  nd::NodeRef in = tape.leaf(nd::Tensor(nd::Shape{1, 1, 4, 4}));
  CHECK_THROWS_AS(nd::conv2d(tape, in, w, b, 1, 0), std::invalid_argument);
  CHECK_NOTHROW(nd::conv2d(tape, in, w, b, 1, 1));  // padded input is large enough
}

TEST_CASE("maxpool2d shapes match the tabulated layers") {
  nd::Tape tape(false);
  {
    nd::NodeRef in = tape.leaf(nd::Tensor(nd::Shape{1, 36, 99, 99}));
    CHECK(nd::maxpool2d(tape, in, 2, 2)->value.shape() == nd::Shape{1, 36, 49, 49});
  }
  {
    nd::NodeRef in = tape.leaf(nd::Tensor(nd::Shape{1, 48, 10, 10}));
    CHECK(nd::maxpool2d(tape, in, 2, 2)->value.shape() == nd::Shape{1, 48, 5, 5});
  }
}

TEST_CASE("maxpool2d of a constant field is that constant") {
  nd::Tape tape(false);
  nd::NodeRef in = tape.leaf(nd::Tensor::full(nd::Shape{1, 1, 4, 4}, 0.75));
  nd::NodeRef out = nd::maxpool2d(tape, in, 2, 2);
  CHECK(out->value.shape() == nd::Shape{1, 1, 2, 2});
  for (std::size_t i = 0; i < out->value.numel(); ++i) CHECK(out->value[i] == 0.75);
}

TEST_CASE("maxpool2d rejects kernels larger than the spatial extent") {
  nd::Tape tape(false);
  nd::NodeRef in = tape.leaf(nd::Tensor(nd::Shape{1, 1, 3, 3}));
  CHECK_THROWS_AS(nd::maxpool2d(tape, in, 4, 1), std::invalid_argument);
}

TEST_CASE("maxpool2d ties route the gradient to the first window position") {
  nd::Tape tape;
  nd::NodeRef in = tape.leaf(nd::Tensor::full(nd::Shape{1, 1, 2, 2}, 1.0));
  nd::NodeRef out = nd::maxpool2d(tape, in, 2, 2);
  nd::NodeRef loss = nd::sum_all(tape, out);
  tape.backward(loss);
  CHECK(in->grad[0] == 1.0);  // row-major scan: index 0 wins the 4-way tie
  CHECK(in->grad[1] == 0.0);
  CHECK(in->grad[2] == 0.0);
  CHECK(in->grad[3] == 0.0);
}

TEST_CASE("linear matches the tabulated FC widths and the identity map") {
  nd::Rng rng(5);
  nd::Tape tape(false);
  {
    nd::Parameter w = rand_param("w", {512, 1200}, rng);
    nd::Parameter b = rand_param("b", {512}, rng);
    nd::NodeRef in = tape.leaf(nd::Tensor(nd::Shape{3, 1200}));
    CHECK(nd::linear(tape, in, w, b)->value.shape() == nd::Shape{3, 512});
  }
  {
    nd::Parameter w = rand_param("w", {512, 5600}, rng);
    nd::Parameter b = rand_param("b", {512}, rng);
    nd::NodeRef in = tape.leaf(nd::Tensor(nd::Shape{3, 5600}));
    CHECK(nd::linear(tape, in, w, b)->value.shape() == nd::Shape{3, 512});
  }
  {
    nd::Parameter w("w", nd::Tensor(nd::Shape{2, 2}, {1, 0, 0, 1}));
    nd::Parameter b("b", nd::Tensor(nd::Shape{2}));
    nd::NodeRef in = tape.leaf(nd::Tensor(nd::Shape{1, 2}, {0.5, -2.0}));
    nd::NodeRef out = nd::linear(tape, in, w, b);
    CHECK(out->value[0] == 0.5);
    CHECK(out->value[1] == -2.0);
  }
  {
    nd::Parameter w = rand_param("w", {4, 7}, rng);
    nd::Parameter b = rand_param("b", {4}, rng);
    nd::NodeRef in = tape.leaf(nd::Tensor(nd::Shape{1, 6}));
    CHECK_THROWS_AS(nd::linear(tape, in, w, b), std::invalid_argument);
  }
}

TEST_CASE("relu sign cases and subgradient") {
  nd::Tape tape;
  nd::NodeRef in = tape.leaf(nd::Tensor(nd::Shape{3}, {-1.0, 0.0, 2.0}));
  nd::NodeRef out = nd::relu(tape, in);
  CHECK(out->value[0] == 0.0);
  CHECK(out->value[1] == 0.0);
  CHECK(out->value[2] == 2.0);

  nd::NodeRef loss = nd::sum_all(tape, out);
  tape.backward(loss);
  CHECK(in->grad[0] == 0.0);  // x < 0
  CHECK(in->grad[1] == 0.0);  // subgradient 0 at exactly 0
  CHECK(in->grad[2] == 1.0);  // x > 0

  nd::Tape t2;
  nd::NodeRef neg = t2.leaf(nd::Tensor::full(nd::Shape{5}, -3.0));
  nd::NodeRef out2 = nd::relu(t2, neg);
  for (std::size_t i = 0; i < 5; ++i) CHECK(out2->value[i] == 0.0);
}

TEST_CASE("dropout degenerate and evaluation modes are the identity") {
  nd::Rng rng(7);
  nd::Tensor x(nd::Shape{64});
  oracles::fill_uniform(x, rng);

  nd::Tape tape;
  nd::NodeRef in = tape.leaf(x);
  nd::Rng drop_rng(99);
  nd::NodeRef train_r0 = nd::dropout(tape, in, 0.0, true, drop_rng);
  nd::NodeRef eval_any = nd::dropout(tape, in, 0.7, false, drop_rng);
  CHECK(train_r0.get() == in.get());
  CHECK(eval_any.get() == in.get());
  CHECK_THROWS_AS(nd::dropout(tape, in, 1.0, true, drop_rng), std::invalid_argument);
}

TEST_CASE("dropout at rate 0.5 keeps about half and preserves the mean") {
  const std::size_t n = 1'000'000;
  nd::Tensor x = nd::Tensor::full(nd::Shape{n}, 1.0);
  nd::Tape tape(false);
  nd::NodeRef in = tape.leaf(x);
  nd::Rng drop_rng(123);
  nd::NodeRef out = nd::dropout(tape, in, 0.5, true, drop_rng);

  std::size_t survivors = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (out->value[i] != 0.0) ++survivors;
    sum += out->value[i];
  }
  const double frac = double(survivors) / double(n);
  CHECK(frac == doctest::Approx(0.5).epsilon(0.02));  // 0.5 +/- 0.01
  CHECK(sum / double(n) == doctest::Approx(1.0).epsilon(0.02));  // inverted scaling
}

TEST_CASE("mean_over_instances trivial cases") {
  nd::Tape tape;
  {
    nd::Tensor rows(nd::Shape{4, 3});
    for (int j = 0; j < 4; ++j)
      for (int c = 0; c < 3; ++c) rows[j * 3 + c] = 0.5 * c - 1.0;
    nd::NodeRef in = tape.leaf(rows);
    nd::NodeRef out = nd::mean_over_instances(tape, in);
    CHECK(out->value.shape() == nd::Shape{3});
    for (int c = 0; c < 3; ++c) CHECK(out->value[c] == doctest::Approx(0.5 * c - 1.0));
  }
  {
    nd::NodeRef in = tape.leaf(nd::Tensor(nd::Shape{2, 2}, {1, 0, 0, 1}));
    nd::NodeRef out = nd::mean_over_instances(tape, in);
    CHECK(out->value[0] == 0.5);
    CHECK(out->value[1] == 0.5);
  }
}

TEST_CASE("mean_over_instances gradient is exactly 1/k per instance") {
  nd::Tape tape;
  nd::NodeRef in = tape.leaf(nd::Tensor(nd::Shape{5, 2}));
  nd::NodeRef out = nd::mean_over_instances(tape, in);
  nd::NodeRef loss = nd::sum_all(tape, out);
  tape.backward(loss);
  for (std::size_t i = 0; i < 10; ++i) CHECK(in->grad[i] == 0.2);
}

TEST_CASE("mean_over_instances is linear and permutation invariant") {
  nd::Rng rng(17);
  const std::size_t k = 9, C = 7;
  nd::Tensor X(nd::Shape{k, C}), Y(nd::Shape{k, C});
  oracles::fill_uniform(X, rng);
  oracles::fill_uniform(Y, rng);
  const double a = 1.7, b = -0.4;

  nd::Tape tape(false);
  nd::Tensor combo(nd::Shape{k, C});
  for (std::size_t i = 0; i < k * C; ++i) combo[i] = a * X[i] + b * Y[i];
  nd::NodeRef mc = nd::mean_over_instances(tape, tape.leaf(combo));
  nd::NodeRef mx = nd::mean_over_instances(tape, tape.leaf(X));
  nd::NodeRef my = nd::mean_over_instances(tape, tape.leaf(Y));
  for (std::size_t c = 0; c < C; ++c)
    CHECK(mc->value[c] == doctest::Approx(a * mx->value[c] + b * my->value[c]).epsilon(1e-15));

  // permutation: reverse the rows
  nd::Tensor Xp(nd::Shape{k, C});
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t c = 0; c < C; ++c) Xp[j * C + c] = X[(k - 1 - j) * C + c];
  nd::NodeRef mp = nd::mean_over_instances(tape, tape.leaf(Xp));
  for (std::size_t c = 0; c < C; ++c)
    CHECK(std::abs(mp->value[c] - mx->value[c]) <= 1e-12);

  CHECK_THROWS_AS(nd::mean_over_instances(tape, tape.leaf(nd::Tensor(nd::Shape{3}))),
                  std::invalid_argument);
}

TEST_CASE("rmse_loss values") {
  nd::Tape tape(false);
  {
    nd::Tensor t(nd::Shape{4}, {0.1, 0.2, 0.3, 0.4});
    nd::NodeRef pred = tape.leaf(t);
    nd::NodeRef loss = nd::rmse_loss(tape, pred, t);
    CHECK(loss->value[0] == 0.0);
  }
  {
    nd::NodeRef pred = tape.leaf(nd::Tensor(nd::Shape{2}, {1.0, 0.0}));
    nd::Tensor target(nd::Shape{2});
    nd::NodeRef loss = nd::rmse_loss(tape, pred, target);
    CHECK(loss->value[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));  // 0.70711
  }
  {
    nd::NodeRef pred = tape.leaf(nd::Tensor(nd::Shape{2}));
    CHECK_THROWS_AS(nd::rmse_loss(tape, pred, nd::Tensor(nd::Shape{3})), std::invalid_argument);
  }
}

TEST_CASE("rmse_loss gradient at pred == target is zero") {
  nd::Tape tape;
  nd::Tensor t(nd::Shape{3}, {0.5, 0.5, 0.5});
  nd::NodeRef pred = tape.leaf(t);
  nd::NodeRef loss = nd::rmse_loss(tape, pred, t);
  tape.backward(loss);
  CHECK_FALSE(pred->has_grad());  // nothing accumulated; gradient defined as 0
}

TEST_CASE("concat, upsample and global pooling shapes") {
  nd::Tape tape(false);
  nd::NodeRef a = tape.leaf(nd::Tensor::full(nd::Shape{1, 2, 3, 3}, 1.0));
  nd::NodeRef b = tape.leaf(nd::Tensor::full(nd::Shape{1, 3, 3, 3}, 2.0));
  nd::NodeRef cat = nd::concat_channels(tape, a, b);
  CHECK(cat->value.shape() == nd::Shape{1, 5, 3, 3});
  CHECK(cat->value[0] == 1.0);
  CHECK(cat->value[2 * 9] == 2.0);

  nd::NodeRef up = nd::upsample2x_bilinear(tape, a);
  CHECK(up->value.shape() == nd::Shape{1, 2, 6, 6});
  for (std::size_t i = 0; i < up->value.numel(); ++i)
    CHECK(up->value[i] == doctest::Approx(1.0).epsilon(1e-15));  // constant field stays constant

  nd::NodeRef gap = nd::global_avg_pool(tape, b);
  CHECK(gap->value.shape() == nd::Shape{1, 3});
  CHECK(gap->value[0] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("conv_transpose2x2 doubles the spatial size") {
  nd::Rng rng(23);
  nd::Tape tape(false);
  nd::Parameter w = rand_param("w", {3, 5, 2, 2}, rng);
  nd::Parameter b = rand_param("b", {5}, rng);
  nd::NodeRef in = tape.leaf(nd::Tensor(nd::Shape{2, 3, 4, 4}));
  nd::NodeRef out = nd::conv_transpose2x2(tape, in, w, b);
  CHECK(out->value.shape() == nd::Shape{2, 5, 8, 8});
}
