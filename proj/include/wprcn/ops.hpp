#pragma once

#include <cstdint>
#include <random>

#include "wprcn/tensor.hpp"

namespace wprcn {

// Floor applied inside every log so densities of exactly zero stay finite.
inline constexpr double kLogFloor = 1e-12;

// --- elementwise / shape ---
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor relu(const Tensor& x);
Tensor tanh_op(const Tensor& x);
Tensor logistic(const Tensor& x);
Tensor log_floored(const Tensor& x);
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor concat(const std::vector<Tensor>& parts);  // 1-d vectors
Tensor row(const Tensor& x, std::size_t i);       // row i of [r x c]
Tensor stack_rows(const std::vector<Tensor>& rows);
Tensor transpose(const Tensor& x);                // [r x c] -> [c x r]
Tensor time_slice(const Tensor& x, std::size_t t);  // column t of [ch x L] -> [ch]

// softmax over the last axis (whole vector, or per row of a matrix);
// rows sum to 1 within 1e-12.
Tensor softmax(const Tensor& x);

// --- linear algebra ---
Tensor matmul(const Tensor& a, const Tensor& b);          // [r x s] * [s x t]
Tensor matvec(const Tensor& w, const Tensor& x);          // [r x c] * [c]
Tensor affine(const Tensor& w, const Tensor& x, const Tensor& b);  // w*x + b
Tensor dot(const Tensor& a, const Tensor& b);             // scalar

// --- sequence ops ---
// Causal dilated convolution: y[co][t] depends on x[.][t - j*dilation],
// j in [0, K-1]; kernel index K-1 is the current step. Output length == L.
Tensor conv1d_causal(const Tensor& x, const Tensor& w, const Tensor& b, std::size_t dilation);
// Same-padded convolution of a vector along its only axis (ECA channel mix).
Tensor conv1d_same_vec(const Tensor& v, const Tensor& w);
Tensor global_avg_pool(const Tensor& x);                          // [ch x L] -> [ch]
Tensor masked_avg_pool(const Tensor& x, std::size_t true_len);    // divide by true length
Tensor scale_channels(const Tensor& x, const Tensor& a);          // x[c][t] * a[c]

// Per-channel batch normalization; with one sample the statistics are taken
// over the time axis (torch BatchNorm1d on a (1, C, L) input).
struct BatchNormState {
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double momentum = 0.1;
  double eps = 1e-5;
  bool initialized = false;
};
Tensor batchnorm(const Tensor& x, const Tensor& gamma, const Tensor& beta, BatchNormState& state,
                 bool training);

// Inverted dropout; identity when not training.
Tensor dropout(const Tensor& x, double p, std::mt19937_64& rng, bool training);

// --- losses ---
Tensor l1_loss(const Tensor& a, const Tensor& b);  // mean elementwise |a - b|
// Numerically stable softmax + negative log likelihood in one op.
Tensor cross_entropy_logits(const Tensor& logits, std::size_t target);

}  // namespace wprcn
