#include "lcc/nd/ops.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace lcc::nd {

namespace {

using MatRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<MatRM>;
using CMapRM = Eigen::Map<const MatRM>;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_rank(const NodeRef& n, std::size_t rank, const char* op) {
  if (!n) throw std::invalid_argument(std::string(op) + ": null input node");
  require(n->value.rank() == rank, std::string(op) + ": expected rank " + std::to_string(rank) +
                                       " input, got shape " + shape_str(n->value.shape()));
}

#ifndef NDEBUG
void debug_check_finite(const Tensor& t, const char* op) {
  assert(all_finite(t) && op);
  (void)t;
  (void)op;
}
#else
void debug_check_finite(const Tensor&, const char*) {}
#endif

// im2col for one strip of output rows [y0, y1) of one batch item.
// col is (Cin*K*K) x ((y1-y0)*Wout), row-major.
void im2col_strip(const double* in, std::size_t Cin, std::size_t H, std::size_t W, int K,
                  int stride, int pad, std::size_t Wout, std::size_t y0, std::size_t y1,
                  double* col) {
  const std::size_t ncols = (y1 - y0) * Wout;
  std::size_t r = 0;
  for (std::size_t c = 0; c < Cin; ++c) {
    const double* plane = in + c * H * W;
    for (int ky = 0; ky < K; ++ky) {
      for (int kx = 0; kx < K; ++kx, ++r) {
        double* dst = col + r * ncols;
        std::size_t o = 0;
        for (std::size_t y = y0; y < y1; ++y) {
          const long iy = static_cast<long>(y) * stride + ky - pad;
          if (iy < 0 || iy >= static_cast<long>(H)) {
            for (std::size_t x = 0; x < Wout; ++x) dst[o++] = 0.0;
            continue;
          }
          const double* row = plane + static_cast<std::size_t>(iy) * W;
          for (std::size_t x = 0; x < Wout; ++x) {
            const long ix = static_cast<long>(x) * stride + kx - pad;
            dst[o++] = (ix < 0 || ix >= static_cast<long>(W)) ? 0.0 : row[ix];
          }
        }
      }
    }
  }
}

// Transpose of im2col_strip: scatter-adds col back into the input gradient.
void col2im_strip(const double* col, std::size_t Cin, std::size_t H, std::size_t W, int K,
                  int stride, int pad, std::size_t Wout, std::size_t y0, std::size_t y1,
                  double* din) {
  const std::size_t ncols = (y1 - y0) * Wout;
  std::size_t r = 0;
  for (std::size_t c = 0; c < Cin; ++c) {
    double* plane = din + c * H * W;
    for (int ky = 0; ky < K; ++ky) {
      for (int kx = 0; kx < K; ++kx, ++r) {
        const double* src = col + r * ncols;
        std::size_t o = 0;
        for (std::size_t y = y0; y < y1; ++y) {
          const long iy = static_cast<long>(y) * stride + ky - pad;
          if (iy < 0 || iy >= static_cast<long>(H)) {
            o += Wout;
            continue;
          }
          double* row = plane + static_cast<std::size_t>(iy) * W;
          for (std::size_t x = 0; x < Wout; ++x) {
            const long ix = static_cast<long>(x) * stride + kx - pad;
            if (ix >= 0 && ix < static_cast<long>(W)) row[ix] += src[o];
            ++o;
          }
        }
      }
    }
  }
}

// Strip height that keeps the im2col buffer around 8M doubles.
std::size_t conv_strip_rows(std::size_t col_rows, std::size_t Wout, std::size_t Hout) {
  const std::size_t budget = 8u << 20;
  std::size_t rows = std::max<std::size_t>(1, budget / std::max<std::size_t>(1, col_rows * Wout));
  return std::min(rows, Hout);
}

// Fixed-order dot product with eight independent accumulator chains. Unlike
// a packed GEMM, the rounding here does not depend on the row's position in
// the batch, so identical instances produce bit-identical outputs.
double dot_fixed(const double* a, const double* b, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0, s6 = 0, s7 = 0;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
    s4 += a[i + 4] * b[i + 4];
    s5 += a[i + 5] * b[i + 5];
    s6 += a[i + 6] * b[i + 6];
    s7 += a[i + 7] * b[i + 7];
  }
  double tail = 0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return (((s0 + s1) + (s2 + s3)) + ((s4 + s5) + (s6 + s7))) + tail;
}

}  // namespace

std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

bool all_finite(const Tensor& t) {
  for (std::size_t i = 0; i < t.numel(); ++i)
    if (!std::isfinite(t[i])) return false;
  return true;
}

NodeRef conv2d(Tape& tape, const NodeRef& input, Parameter& weight, Parameter& bias, int stride,
               int padding) {
  check_rank(input, 4, "conv2d");
  const auto& is = input->value.shape();
  const auto& ws = weight.value().shape();
  require(ws.size() == 4 && ws[2] == ws[3],
          "conv2d: weights must be [Cout,Cin,K,K], got " + shape_str(ws));
  require(is[1] == ws[1], "conv2d: input channels do not match weight Cin: input " +
                              shape_str(is) + " vs weights " + shape_str(ws));
  require(bias.value().rank() == 1 && bias.value().dim(0) == ws[0],
          "conv2d: bias must be [Cout]=" + std::to_string(ws[0]) + ", got " +
              shape_str(bias.value().shape()));
  require(stride >= 1, "conv2d: stride must be >= 1");
  require(padding >= 0, "conv2d: padding must be >= 0");

  const std::size_t b = is[0], Cin = is[1], H = is[2], W = is[3];
  const std::size_t Cout = ws[0];
  const int K = static_cast<int>(ws[2]);
  require(static_cast<long>(K) <= static_cast<long>(H) + 2 * padding &&
              static_cast<long>(K) <= static_cast<long>(W) + 2 * padding,
          "conv2d: kernel " + std::to_string(K) + " exceeds padded input " + shape_str(is));

  const std::size_t Hout = (H - K + 2 * padding) / stride + 1;
  const std::size_t Wout = (W - K + 2 * padding) / stride + 1;
  const std::size_t col_rows = Cin * K * K;

  NodeRef out = make_node(Tensor(Shape{b, Cout, Hout, Wout}));

  CMapRM wmat(weight.value().data(), Cout, col_rows);
  const std::size_t strip = conv_strip_rows(col_rows, Wout, Hout);
  aligned_vector<double> col(col_rows * strip * Wout);

  for (std::size_t i = 0; i < b; ++i) {
    const double* in = input->value.data() + i * Cin * H * W;
    MapRM out_mat(out->value.data() + i * Cout * Hout * Wout, Cout, Hout * Wout);
    for (std::size_t y0 = 0; y0 < Hout; y0 += strip) {
      const std::size_t y1 = std::min(Hout, y0 + strip);
      const std::size_t ncols = (y1 - y0) * Wout;
      im2col_strip(in, Cin, H, W, K, stride, padding, Wout, y0, y1, col.data());
      CMapRM cmat(col.data(), col_rows, ncols);
      out_mat.block(0, y0 * Wout, Cout, ncols).noalias() = wmat * cmat;
    }
    for (std::size_t c = 0; c < Cout; ++c)
      out_mat.row(c).array() += bias.value()[c];
  }
  debug_check_finite(out->value, "conv2d");

  tape.record([input, out, wp = &weight, bp = &bias, b, Cin, H, W, K, stride, padding, Cout, Hout,
               Wout, col_rows]() {
    if (!out->has_grad()) return;
    Tensor& din = input->ensure_grad();
    Tensor& dw = wp->grad();
    Tensor& db = bp->grad();
    CMapRM wmat(wp->value().data(), Cout, col_rows);
    MapRM dwmat(dw.data(), Cout, col_rows);
    const std::size_t strip = conv_strip_rows(col_rows, Wout, Hout);
    aligned_vector<double> col(col_rows * strip * Wout);
    aligned_vector<double> dcol(col_rows * strip * Wout);
    for (std::size_t i = 0; i < b; ++i) {
      const double* in = input->value.data() + i * Cin * H * W;
      CMapRM dy(out->grad.data() + i * Cout * Hout * Wout, Cout, Hout * Wout);
      for (std::size_t y0 = 0; y0 < Hout; y0 += strip) {
        const std::size_t y1 = std::min(Hout, y0 + strip);
        const std::size_t ncols = (y1 - y0) * Wout;
        im2col_strip(in, Cin, H, W, K, stride, padding, Wout, y0, y1, col.data());
        CMapRM cmat(col.data(), col_rows, ncols);
        auto dyblk = dy.block(0, y0 * Wout, Cout, ncols);
        dwmat.noalias() += dyblk * cmat.transpose();
        MapRM dcmat(dcol.data(), col_rows, ncols);
        dcmat.noalias() = wmat.transpose() * dyblk;
        col2im_strip(dcol.data(), Cin, H, W, K, stride, padding, Wout, y0, y1,
                     din.data() + i * Cin * H * W);
      }
      for (std::size_t c = 0; c < Cout; ++c) db[c] += dy.row(c).sum();
    }
  });
  return out;
}

NodeRef maxpool2d(Tape& tape, const NodeRef& input, int kernel, int stride) {
  check_rank(input, 4, "maxpool2d");
  require(kernel >= 1 && stride >= 1, "maxpool2d: kernel and stride must be >= 1");
  const auto& is = input->value.shape();
  const std::size_t b = is[0], C = is[1], H = is[2], W = is[3];
  require(static_cast<std::size_t>(kernel) <= H && static_cast<std::size_t>(kernel) <= W,
          "maxpool2d: kernel " + std::to_string(kernel) + " larger than spatial extent of " +
              shape_str(is));

  const std::size_t Hout = (H - kernel) / stride + 1;
  const std::size_t Wout = (W - kernel) / stride + 1;
  NodeRef out = make_node(Tensor(Shape{b, C, Hout, Wout}));

  // Flat input index of each window argmax, for routing gradients.
  auto argmax = std::make_shared<std::vector<std::uint32_t>>();
  const bool track = tape.recording();
  if (track) argmax->resize(b * C * Hout * Wout);

  std::size_t o = 0;
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t c = 0; c < C; ++c) {
      const double* plane = input->value.data() + (i * C + c) * H * W;
      const std::size_t plane_off = (i * C + c) * H * W;
      for (std::size_t y = 0; y < Hout; ++y) {
        for (std::size_t x = 0; x < Wout; ++x, ++o) {
          const std::size_t iy0 = y * stride, ix0 = x * stride;
          double best = plane[iy0 * W + ix0];
          std::size_t best_idx = iy0 * W + ix0;
          for (int dy = 0; dy < kernel; ++dy) {
            const std::size_t row = (iy0 + dy) * W;
            for (int dx = 0; dx < kernel; ++dx) {
              const std::size_t idx = row + ix0 + dx;
              if (plane[idx] > best) {  // strict: first max wins on ties
                best = plane[idx];
                best_idx = idx;
              }
            }
          }
          out->value[o] = best;
          if (track) (*argmax)[o] = static_cast<std::uint32_t>(plane_off + best_idx);
        }
      }
    }
  }
  debug_check_finite(out->value, "maxpool2d");

  tape.record([input, out, argmax]() {
    if (!out->has_grad()) return;
    Tensor& din = input->ensure_grad();
    for (std::size_t o = 0; o < out->grad.numel(); ++o) din[(*argmax)[o]] += out->grad[o];
  });
  return out;
}

NodeRef linear(Tape& tape, const NodeRef& input, Parameter& weight, Parameter& bias) {
  check_rank(input, 2, "linear");
  const auto& is = input->value.shape();
  const auto& ws = weight.value().shape();
  require(ws.size() == 2, "linear: weights must be [M,N], got " + shape_str(ws));
  require(is[1] == ws[1], "linear: input width does not match weights: input " + shape_str(is) +
                              " vs weights " + shape_str(ws));
  require(bias.value().rank() == 1 && bias.value().dim(0) == ws[0],
          "linear: bias must be [M]=" + std::to_string(ws[0]) + ", got " +
              shape_str(bias.value().shape()));

  const std::size_t b = is[0], N = is[1], M = ws[0];
  NodeRef out = make_node(Tensor(Shape{b, M}));

  // Row-independent kernel: each instance row is computed exactly the same
  // way, wherever it sits in the batch.
  for (std::size_t i = 0; i < b; ++i) {
    const double* row = input->value.data() + i * N;
    double* dst = out->value.data() + i * M;
    for (std::size_t j = 0; j < M; ++j)
      dst[j] = dot_fixed(row, weight.value().data() + j * N, N) + bias.value()[j];
  }
  debug_check_finite(out->value, "linear");

  tape.record([input, out, wp = &weight, bp = &bias, b, N, M]() {
    if (!out->has_grad()) return;
    Tensor& din = input->ensure_grad();
    CMapRM dy(out->grad.data(), b, M);
    CMapRM in(input->value.data(), b, N);
    CMapRM w(wp->value().data(), M, N);
    MapRM din_m(din.data(), b, N);
    din_m.noalias() += dy * w;
    MapRM dw(wp->grad().data(), M, N);
    dw.noalias() += dy.transpose() * in;
    Tensor& db = bp->grad();
    for (std::size_t j = 0; j < M; ++j) db[j] += dy.col(j).sum();
  });
  return out;
}

NodeRef relu(Tape& tape, const NodeRef& input) {
  if (!input) throw std::invalid_argument("relu: null input node");
  NodeRef out = make_node(Tensor(input->value.shape()));
  const std::size_t n = input->value.numel();
  for (std::size_t i = 0; i < n; ++i) out->value[i] = std::max(0.0, input->value[i]);

  tape.record([input, out, n]() {
    if (!out->has_grad()) return;
    Tensor& din = input->ensure_grad();
    for (std::size_t i = 0; i < n; ++i)
      if (input->value[i] > 0.0) din[i] += out->grad[i];
  });
  return out;
}

NodeRef dropout(Tape& tape, const NodeRef& input, double rate, bool training, Rng& rng) {
  if (!input) throw std::invalid_argument("dropout: null input node");
  require(rate >= 0.0 && rate < 1.0, "dropout: rate must be in [0,1), got " + std::to_string(rate));
  if (!training || rate == 0.0) return input;

  const std::size_t n = input->value.numel();
  const double scale = 1.0 / (1.0 - rate);
  auto mask = std::make_shared<std::vector<std::uint8_t>>(n);
  NodeRef out = make_node(Tensor(input->value.shape()));
  for (std::size_t i = 0; i < n; ++i) {
    const bool keep = !rng.bernoulli(rate);
    (*mask)[i] = keep;
    out->value[i] = keep ? input->value[i] * scale : 0.0;
  }

  tape.record([input, out, mask, scale, n]() {
    if (!out->has_grad()) return;
    Tensor& din = input->ensure_grad();
    for (std::size_t i = 0; i < n; ++i)
      if ((*mask)[i]) din[i] += out->grad[i] * scale;
  });
  return out;
}

NodeRef flatten2d(Tape& tape, const NodeRef& input) {
  if (!input) throw std::invalid_argument("flatten2d: null input node");
  require(input->value.rank() >= 2, "flatten2d: expected rank >= 2, got shape " +
                                        shape_str(input->value.shape()));
  const std::size_t b = input->value.dim(0);
  const std::size_t rest = input->value.numel() / b;
  Tensor flat(Shape{b, rest});
  std::copy_n(input->value.data(), input->value.numel(), flat.data());
  NodeRef out = make_node(std::move(flat));
  tape.record([input, out]() {
    if (!out->has_grad()) return;
    Tensor& din = input->ensure_grad();
    for (std::size_t i = 0; i < din.numel(); ++i) din[i] += out->grad[i];
  });
  return out;
}

NodeRef mean_over_instances(Tape& tape, const NodeRef& patch_preds) {
  check_rank(patch_preds, 2, "mean_over_instances");
  const std::size_t k = patch_preds->value.dim(0);
  const std::size_t C = patch_preds->value.dim(1);
  require(k >= 1, "mean_over_instances: empty bag");

  NodeRef out = make_node(Tensor(Shape{C}));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t c = 0; c < C; ++c) out->value[c] += patch_preds->value[j * C + c];
  const double inv_k = 1.0 / static_cast<double>(k);
  for (std::size_t c = 0; c < C; ++c) out->value[c] *= inv_k;

  tape.record([patch_preds, out, k, C, inv_k]() {
    if (!out->has_grad()) return;
    Tensor& din = patch_preds->ensure_grad();
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t c = 0; c < C; ++c) din[j * C + c] += out->grad[c] * inv_k;
  });
  return out;
}

NodeRef rmse_loss(Tape& tape, const NodeRef& pred, const Tensor& target) {
  if (!pred) throw std::invalid_argument("rmse_loss: null prediction node");
  require(pred->value.shape() == target.shape(),
          "rmse_loss: shape mismatch, pred " + shape_str(pred->value.shape()) + " vs target " +
              shape_str(target.shape()));
  const std::size_t n = pred->value.numel();
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pred->value[i] - target[i];
    sq += d * d;
  }
  const double rmse = std::sqrt(sq / static_cast<double>(n));
  NodeRef out = make_node(Tensor::scalar(rmse));

  auto tgt = std::make_shared<Tensor>(target);
  tape.record([pred, out, tgt, n, rmse]() {
    if (!out->has_grad() || rmse == 0.0) return;  // gradient defined as 0 at pred == target
    Tensor& din = pred->ensure_grad();
    const double g = out->grad[0] / (static_cast<double>(n) * rmse);
    for (std::size_t i = 0; i < n; ++i) din[i] += g * (pred->value[i] - (*tgt)[i]);
  });
  return out;
}

NodeRef concat_channels(Tape& tape, const NodeRef& a, const NodeRef& b) {
  check_rank(a, 4, "concat_channels");
  check_rank(b, 4, "concat_channels");
  const auto& as = a->value.shape();
  const auto& bs = b->value.shape();
  require(as[0] == bs[0] && as[2] == bs[2] && as[3] == bs[3],
          "concat_channels: incompatible shapes " + shape_str(as) + " and " + shape_str(bs));
  const std::size_t n = as[0], Ca = as[1], Cb = bs[1], H = as[2], W = as[3];
  NodeRef out = make_node(Tensor(Shape{n, Ca + Cb, H, W}));

  const std::size_t plane = H * W;
  for (std::size_t i = 0; i < n; ++i) {
    double* dst = out->value.data() + i * (Ca + Cb) * plane;
    std::copy_n(a->value.data() + i * Ca * plane, Ca * plane, dst);
    std::copy_n(b->value.data() + i * Cb * plane, Cb * plane, dst + Ca * plane);
  }

  tape.record([a, b, out, n, Ca, Cb, plane]() {
    if (!out->has_grad()) return;
    Tensor& da = a->ensure_grad();
    Tensor& db = b->ensure_grad();
    for (std::size_t i = 0; i < n; ++i) {
      const double* src = out->grad.data() + i * (Ca + Cb) * plane;
      double* pa = da.data() + i * Ca * plane;
      double* pb = db.data() + i * Cb * plane;
      for (std::size_t j = 0; j < Ca * plane; ++j) pa[j] += src[j];
      for (std::size_t j = 0; j < Cb * plane; ++j) pb[j] += src[Ca * plane + j];
    }
  });
  return out;
}

namespace {

// Source taps for bilinear sampling at output position `o` of a 2x upsample
// (half-pixel centers, clamped at borders).
struct Tap {
  std::size_t lo, hi;
  double w_hi;  // weight of hi; lo gets (1 - w_hi)
};

Tap tap_for(std::size_t o, std::size_t in_size) {
  const double src = (static_cast<double>(o) + 0.5) / 2.0 - 0.5;
  if (src <= 0.0) return {0, 0, 0.0};
  if (src >= static_cast<double>(in_size - 1)) return {in_size - 1, in_size - 1, 0.0};
  const std::size_t lo = static_cast<std::size_t>(src);
  return {lo, lo + 1, src - static_cast<double>(lo)};
}

}  // namespace

NodeRef upsample2x_bilinear(Tape& tape, const NodeRef& input) {
  check_rank(input, 4, "upsample2x_bilinear");
  const auto& is = input->value.shape();
  const std::size_t b = is[0], C = is[1], H = is[2], W = is[3];
  const std::size_t Ho = 2 * H, Wo = 2 * W;
  NodeRef out = make_node(Tensor(Shape{b, C, Ho, Wo}));

  std::vector<Tap> ty(Ho), tx(Wo);
  for (std::size_t y = 0; y < Ho; ++y) ty[y] = tap_for(y, H);
  for (std::size_t x = 0; x < Wo; ++x) tx[x] = tap_for(x, W);

  for (std::size_t i = 0; i < b * C; ++i) {
    const double* src = input->value.data() + i * H * W;
    double* dst = out->value.data() + i * Ho * Wo;
    for (std::size_t y = 0; y < Ho; ++y) {
      const Tap& a = ty[y];
      for (std::size_t x = 0; x < Wo; ++x) {
        const Tap& c = tx[x];
        const double top = src[a.lo * W + c.lo] * (1 - c.w_hi) + src[a.lo * W + c.hi] * c.w_hi;
        const double bot = src[a.hi * W + c.lo] * (1 - c.w_hi) + src[a.hi * W + c.hi] * c.w_hi;
        dst[y * Wo + x] = top * (1 - a.w_hi) + bot * a.w_hi;
      }
    }
  }

  tape.record([input, out, b, C, H, W, Ho, Wo]() {
    if (!out->has_grad()) return;
    Tensor& din = input->ensure_grad();
    for (std::size_t i = 0; i < b * C; ++i) {
      double* d = din.data() + i * H * W;
      const double* g = out->grad.data() + i * Ho * Wo;
      for (std::size_t y = 0; y < Ho; ++y) {
        const Tap a = tap_for(y, H);
        for (std::size_t x = 0; x < Wo; ++x) {
          const Tap c = tap_for(x, W);
          const double gv = g[y * Wo + x];
          d[a.lo * W + c.lo] += gv * (1 - a.w_hi) * (1 - c.w_hi);
          d[a.lo * W + c.hi] += gv * (1 - a.w_hi) * c.w_hi;
          d[a.hi * W + c.lo] += gv * a.w_hi * (1 - c.w_hi);
          d[a.hi * W + c.hi] += gv * a.w_hi * c.w_hi;
        }
      }
    }
  });
  return out;
}

NodeRef conv_transpose2x2(Tape& tape, const NodeRef& input, Parameter& weight, Parameter& bias) {
  check_rank(input, 4, "conv_transpose2x2");
  const auto& is = input->value.shape();
  const auto& ws = weight.value().shape();
  require(ws.size() == 4 && ws[2] == 2 && ws[3] == 2,
          "conv_transpose2x2: weights must be [Cin,Cout,2,2], got " + shape_str(ws));
  require(is[1] == ws[0], "conv_transpose2x2: input channels do not match weight Cin: input " +
                              shape_str(is) + " vs weights " + shape_str(ws));
  const std::size_t b = is[0], Cin = is[1], H = is[2], W = is[3];
  const std::size_t Cout = ws[1];
  require(bias.value().rank() == 1 && bias.value().dim(0) == Cout,
          "conv_transpose2x2: bias must be [Cout]=" + std::to_string(Cout));

  NodeRef out = make_node(Tensor(Shape{b, Cout, 2 * H, 2 * W}));

  // Stride-2 windows do not overlap: each (dy,dx) phase is an independent
  // 1x1 convolution scattered to the even/odd output lattice.
  const std::size_t HW = H * W;
  aligned_vector<double> wphase(Cout * Cin);
  aligned_vector<double> tmp(Cout * HW);
  for (int dy = 0; dy < 2; ++dy) {
    for (int dx = 0; dx < 2; ++dx) {
      for (std::size_t ci = 0; ci < Cin; ++ci)
        for (std::size_t co = 0; co < Cout; ++co)
          wphase[co * Cin + ci] = weight.value()[((ci * Cout + co) * 2 + dy) * 2 + dx];
      CMapRM wmat(wphase.data(), Cout, Cin);
      for (std::size_t i = 0; i < b; ++i) {
        CMapRM in(input->value.data() + i * Cin * HW, Cin, HW);
        MapRM t(tmp.data(), Cout, HW);
        t.noalias() = wmat * in;
        for (std::size_t co = 0; co < Cout; ++co) {
          double* plane = out->value.data() + (i * Cout + co) * 4 * HW;
          const double bv = bias.value()[co];
          for (std::size_t y = 0; y < H; ++y)
            for (std::size_t x = 0; x < W; ++x)
              plane[(2 * y + dy) * 2 * W + (2 * x + dx)] = tmp[co * HW + y * W + x] + bv;
        }
      }
    }
  }
  debug_check_finite(out->value, "conv_transpose2x2");

  tape.record([input, out, wp = &weight, bp = &bias, b, Cin, Cout, H, W, HW]() {
    if (!out->has_grad()) return;
    Tensor& din = input->ensure_grad();
    Tensor& dw = wp->grad();
    Tensor& db = bp->grad();
    aligned_vector<double> gphase(Cout * HW);
    aligned_vector<double> wphase(Cout * Cin);
    aligned_vector<double> acc(Cout * Cin);
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) {
        for (std::size_t ci = 0; ci < Cin; ++ci)
          for (std::size_t co = 0; co < Cout; ++co)
            wphase[co * Cin + ci] = wp->value()[((ci * Cout + co) * 2 + dy) * 2 + dx];
        CMapRM wmat(wphase.data(), Cout, Cin);
        for (std::size_t i = 0; i < b; ++i) {
          for (std::size_t co = 0; co < Cout; ++co) {
            const double* plane = out->grad.data() + (i * Cout + co) * 4 * HW;
            double bsum = 0.0;
            for (std::size_t y = 0; y < H; ++y)
              for (std::size_t x = 0; x < W; ++x) {
                const double g = plane[(2 * y + dy) * 2 * W + (2 * x + dx)];
                gphase[co * HW + y * W + x] = g;
                bsum += g;
              }
            db[co] += bsum;
          }
          CMapRM gmat(gphase.data(), Cout, HW);
          CMapRM in(input->value.data() + i * Cin * HW, Cin, HW);
          MapRM din_m(din.data() + i * Cin * HW, Cin, HW);
          din_m.noalias() += wmat.transpose() * gmat;
          MapRM accm(acc.data(), Cout, Cin);
          accm.noalias() = gmat * in.transpose();
          for (std::size_t ci = 0; ci < Cin; ++ci)
            for (std::size_t co = 0; co < Cout; ++co)
              dw[((ci * Cout + co) * 2 + dy) * 2 + dx] += acc[co * Cin + ci];
        }
      }
    }
  });
  return out;
}

NodeRef global_avg_pool(Tape& tape, const NodeRef& input) {
  check_rank(input, 4, "global_avg_pool");
  const auto& is = input->value.shape();
  const std::size_t b = is[0], C = is[1], HW = is[2] * is[3];
  NodeRef out = make_node(Tensor(Shape{b, C}));
  const double inv = 1.0 / static_cast<double>(HW);
  for (std::size_t i = 0; i < b * C; ++i) {
    const double* src = input->value.data() + i * HW;
    double s = 0.0;
    for (std::size_t j = 0; j < HW; ++j) s += src[j];
    out->value[i] = s * inv;
  }

  tape.record([input, out, b, C, HW, inv]() {
    if (!out->has_grad()) return;
    Tensor& din = input->ensure_grad();
    for (std::size_t i = 0; i < b * C; ++i) {
      const double g = out->grad[i] * inv;
      double* d = din.data() + i * HW;
      for (std::size_t j = 0; j < HW; ++j) d[j] += g;
    }
  });
  return out;
}

NodeRef sum_all(Tape& tape, const NodeRef& input) {
  if (!input) throw std::invalid_argument("sum_all: null input node");
  double s = 0.0;
  for (std::size_t i = 0; i < input->value.numel(); ++i) s += input->value[i];
  NodeRef out = make_node(Tensor::scalar(s));
  tape.record([input, out]() {
    if (!out->has_grad()) return;
    Tensor& din = input->ensure_grad();
    for (std::size_t i = 0; i < din.numel(); ++i) din[i] += out->grad[0];
  });
  return out;
}

NodeRef add_param(Tape& tape, const NodeRef& input, Parameter& p) {
  if (!input) throw std::invalid_argument("add_param: null input node");
  require(input->value.shape() == p.value().shape(),
          "add_param: shape mismatch, input " + shape_str(input->value.shape()) + " vs param " +
              shape_str(p.value().shape()));
  NodeRef out = make_node(Tensor(input->value.shape()));
  for (std::size_t i = 0; i < out->value.numel(); ++i)
    out->value[i] = input->value[i] + p.value()[i];
  tape.record([input, out, pp = &p]() {
    if (!out->has_grad()) return;
    Tensor& din = input->ensure_grad();
    Tensor& dp = pp->grad();
    for (std::size_t i = 0; i < out->grad.numel(); ++i) {
      din[i] += out->grad[i];
      dp[i] += out->grad[i];
    }
  });
  return out;
}

}  // namespace lcc::nd
