#pragma once

#include <optional>
#include <random>

#include "wprcn/layers.hpp"

namespace wprcn {

// Channel-attention probabilistic TCN configuration. The module itself
// accepts any positive sizes (tiny configs are used by the gradient suite);
// validate_grid() enforces the experiment search ranges.
struct AptcnConfig {
  std::size_t in_channels = 15;
  std::size_t pruned_channels = 5;
  std::size_t eca_kernel = 3;      // {1, 3, 5}
  std::size_t tcn_kernel = 3;      // {3, 5, 7, 11}
  std::size_t depth = 3;           // [3, 8]
  std::size_t level_channels = 20; // {20, 25}
  double dropout = 0.2;
  bool use_eca = true;             // switched off by ablation A3

  void validate_grid() const;
  // Earliest input index that can influence the last output:
  // receptive field = 1 + sum_i 2 (K-1) 2^i over the block levels.
  std::size_t receptive_field() const;
};

// Per-channel attention scores in (0,1), identical at every timestep.
struct AttentionScore {
  std::vector<double> a;
};

// Channel pruning -> efficient channel attention -> dilated causal residual
// stack; the classification feature is the last timestep of the final block.
class AptcnNet {
 public:
  AptcnNet() = default;
  AptcnNet(const AptcnConfig& config, std::mt19937_64& rng);

  // Pointwise (kernel-1) channel pruning; no temporal mixing.
  Tensor prune_channels(const Tensor& p) const;
  // a = logistic(conv1d over the channel axis of the per-channel GAP vector);
  // output is the input scaled channelwise by a.
  std::pair<Tensor, AttentionScore> eca(const Tensor& p_pruned) const;
  // Residual stack of `depth` blocks, two causal convolutions per block with
  // dilation 2^i; returns the last-timestep feature vector.
  Tensor tcn_forward(const Tensor& o, std::mt19937_64& rng, bool training) const;
  // Full [ch x L] output of the residual stack.
  Tensor tcn_feature_map(const Tensor& o, std::mt19937_64& rng, bool training) const;

  Tensor forward(const Tensor& p, std::mt19937_64& rng, bool training) const;
  AttentionScore last_attention(const Tensor& p) const;

  void register_params(ParamRegistry& reg, const std::string& prefix) const;
  const AptcnConfig& config() const { return config_; }
  std::size_t output_dim() const { return config_.level_channels; }

 private:
  struct Block {
    Conv1dCausal conv1, conv2;
    std::optional<Conv1dCausal> res_proj;  // 1x1 when the channel count changes
  };

  AptcnConfig config_;
  Conv1dCausal prune_;
  Tensor eca_weights_;  // [eca_kernel], bias-free channel-axis convolution
  std::vector<Block> blocks_;
};

}  // namespace wprcn
