#pragma once

#include "lcc/nd/parameter.hpp"
#include "lcc/nd/rng.hpp"
#include "lcc/nd/tape.hpp"

namespace lcc::nd {

/// 2D convolution, input [b,Cin,H,W], weights [Cout,Cin,K,K], bias [Cout].
/// Output [b,Cout,H',W'] with H' = floor((H - K + 2*padding)/stride) + 1.
NodeRef conv2d(Tape& tape, const NodeRef& input, Parameter& weight, Parameter& bias, int stride,
               int padding);

/// Max pooling over [b,C,H,W]. Backward routes each output gradient to the
/// argmax position of its window; ties go to the first element in row-major
/// window scan order.
NodeRef maxpool2d(Tape& tape, const NodeRef& input, int kernel, int stride);

/// Fully connected layer: out[i,j] = sum_n in[i,n]*w[j,n] + b[j].
/// Input [b,N], weights [M,N], bias [M], output [b,M].
NodeRef linear(Tape& tape, const NodeRef& input, Parameter& weight, Parameter& bias);

NodeRef relu(Tape& tape, const NodeRef& input);

/// Inverted dropout: in training mode each element is zeroed with probability
/// `rate` and survivors are scaled by 1/(1-rate); in evaluation mode this is
/// the identity (the input node is returned unchanged).
NodeRef dropout(Tape& tape, const NodeRef& input, double rate, bool training, Rng& rng);

/// [b, d1, d2, ...] -> [b, d1*d2*...]
NodeRef flatten2d(Tape& tape, const NodeRef& input);

/// MIL mean aggregation: [k,C] -> [C], out[c] = (1/k) * sum_j preds[j,c].
NodeRef mean_over_instances(Tape& tape, const NodeRef& patch_preds);

/// sqrt((1/n)*sum((pred-target)^2)) as a scalar node. The gradient at
/// pred == target is defined as zero.
NodeRef rmse_loss(Tape& tape, const NodeRef& pred, const Tensor& target);

/// Channel concatenation of two [b,C*,H,W] nodes.
NodeRef concat_channels(Tape& tape, const NodeRef& a, const NodeRef& b);

/// Doubles spatial size by bilinear interpolation (half-pixel centers).
NodeRef upsample2x_bilinear(Tape& tape, const NodeRef& input);

/// Transposed convolution with kernel 2, stride 2 (non-overlapping windows).
/// Input [b,Cin,H,W], weights [Cin,Cout,2,2], bias [Cout], output [b,Cout,2H,2W].
NodeRef conv_transpose2x2(Tape& tape, const NodeRef& input, Parameter& weight, Parameter& bias);

/// Global average pooling: [b,C,H,W] -> [b,C].
NodeRef global_avg_pool(Tape& tape, const NodeRef& input);

/// Elementwise sum reduction to a scalar node (test and loss plumbing).
NodeRef sum_all(Tape& tape, const NodeRef& input);

/// Applies a parameter tensor elementwise: out = input + p (shapes equal).
/// Exists so tests can put bare parameters onto a tape.
NodeRef add_param(Tape& tape, const NodeRef& input, Parameter& p);

}  // namespace lcc::nd
