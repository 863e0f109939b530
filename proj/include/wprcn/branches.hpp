#pragma once

#include <array>
#include <random>

#include "wprcn/layers.hpp"

namespace wprcn {

// Squeeze-and-excitation: per-channel scores from a two-matrix bottleneck on
// the GAP vector, omega = logistic(W2 relu(W1 gap(x))), applied channelwise.
// The bottleneck width is ceil(ch / reduction).
struct SeBlock {
  Tensor w1, w2;
  std::size_t channels = 0;

  SeBlock() = default;
  SeBlock(std::size_t channels, std::size_t reduction, std::mt19937_64& rng);
  // true_len = 0 means the full length; otherwise the squeeze pools over the
  // unpadded prefix only, so trailing zero-padding cannot distort the gate.
  Tensor operator()(const Tensor& x, std::size_t true_len = 0) const;
  Tensor scores(const Tensor& x, std::size_t true_len = 0) const;  // omega in (0,1)^ch
  void register_params(ParamRegistry& reg, const std::string& prefix) const;
};

// Causal FCN branch settings, adopted from the configuration the model
// family conventionally uses: channels (128, 256, 128), kernels (8, 5, 3),
// SE after the first two blocks, reduction 16.
struct CfcnConfig {
  std::array<std::size_t, 3> channels = {128, 256, 128};
  std::array<std::size_t, 3> kernels = {8, 5, 3};
  std::size_t se_reduction = 16;
};

// Three causal conv blocks (conv -> BN -> ReLU, SE on the first two), then a
// mask-aware global average pool over the true sequence length.
class CfcnBranch {
 public:
  CfcnBranch() = default;
  CfcnBranch(std::size_t input_dim, const CfcnConfig& config, std::mt19937_64& rng);

  Tensor forward(const Tensor& x, bool training, std::size_t true_len) const;
  // Pre-pooling feature map. The SE gates are squeeze(GAP)-scoped, so they
  // modulate a channel with one scalar computed over the whole (true) length;
  // with_se = false exposes the purely causal conv/BN/ReLU path that the
  // strict causality checks exercise.
  Tensor feature_map(const Tensor& x, bool training, std::size_t true_len = 0,
                     bool with_se = true) const;

  void register_params(ParamRegistry& reg, const std::string& prefix) const;
  std::vector<BatchNormState*> bn_states() const;
  std::size_t output_dim() const { return config_.channels[2]; }
  const CfcnConfig& config() const { return config_; }

 private:
  CfcnConfig config_;
  Conv1dCausal conv1_, conv2_, conv3_;
  BatchNorm1d bn1_, bn2_, bn3_;
  SeBlock se1_, se2_;
};

// LSTM over the time axis (no dimension shuffle); final hidden state through
// dropout.
class LstmBranch {
 public:
  LstmBranch() = default;
  LstmBranch(std::size_t input_dim, std::size_t hidden, double dropout_p, std::mt19937_64& rng);

  Tensor forward(const Tensor& x, std::mt19937_64& rng, bool training) const;  // x: [n x L]
  void register_params(ParamRegistry& reg, const std::string& prefix) const;
  std::size_t output_dim() const { return lstm_.n_hidden; }

 private:
  LstmLayer lstm_;
  double dropout_p_ = 0.2;
};

}  // namespace wprcn
