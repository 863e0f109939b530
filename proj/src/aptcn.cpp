#include "wprcn/aptcn.hpp"

#include "wprcn/ops.hpp"

namespace wprcn {

void AptcnConfig::validate_grid() const {
  check(eca_kernel == 1 || eca_kernel == 3 || eca_kernel == 5,
        "aptcn: attention key size must be one of {1,3,5}");
  check(tcn_kernel == 3 || tcn_kernel == 5 || tcn_kernel == 7 || tcn_kernel == 11,
        "aptcn: kernel size must be one of {3,5,7,11}");
  check(depth >= 3 && depth <= 8, "aptcn: depth must be in [3,8]");
  check(level_channels == 20 || level_channels == 25,
        "aptcn: channel output must be 20 or 25");
  check(dropout >= 0.0 && dropout < 1.0, "aptcn: dropout must be in [0,1)");
}

std::size_t AptcnConfig::receptive_field() const {
  std::size_t rf = 1;
  for (std::size_t i = 0; i < depth; ++i) rf += 2 * (tcn_kernel - 1) * (1u << i);
  return rf;
}

AptcnNet::AptcnNet(const AptcnConfig& config, std::mt19937_64& rng) : config_(config) {
  check(config.in_channels >= 1 && config.pruned_channels >= 1 && config.depth >= 1,
        "aptcn: bad configuration");
  check(config.eca_kernel % 2 == 1, "aptcn: attention key size must be odd");
  prune_ = Conv1dCausal(config.in_channels, config.pruned_channels, 1, 1, rng);
  eca_weights_ = glorot({config.eca_kernel}, config.eca_kernel, 1, rng);
  std::size_t in_ch = config.pruned_channels;
  for (std::size_t i = 0; i < config.depth; ++i) {
    Block b;
    const std::size_t dilation = 1u << i;
    b.conv1 = Conv1dCausal(in_ch, config.level_channels, config.tcn_kernel, dilation, rng);
    b.conv2 =
        Conv1dCausal(config.level_channels, config.level_channels, config.tcn_kernel, dilation, rng);
    if (in_ch != config.level_channels)
      b.res_proj = Conv1dCausal(in_ch, config.level_channels, 1, 1, rng);
    blocks_.push_back(std::move(b));
    in_ch = config.level_channels;
  }
}

Tensor AptcnNet::prune_channels(const Tensor& p) const {
  check(p.ndim() == 2 && p.dim(0) == config_.in_channels,
        "aptcn: expected " + std::to_string(config_.in_channels) + " input channels, got " +
            shape_str(p.shape()));
  return prune_(p);
}

std::pair<Tensor, AttentionScore> AptcnNet::eca(const Tensor& p_pruned) const {
  Tensor gap = global_avg_pool(p_pruned);
  Tensor a = logistic(conv1d_same_vec(gap, eca_weights_));
  AttentionScore score;
  score.a.assign(a.data(), a.data() + a.size());
  return {scale_channels(p_pruned, a), score};
}

Tensor AptcnNet::tcn_feature_map(const Tensor& o, std::mt19937_64& rng, bool training) const {
  Tensor z = o;
  for (const Block& b : blocks_) {
    Tensor branch = dropout(relu(b.conv1(z)), config_.dropout, rng, training);
    branch = dropout(relu(b.conv2(branch)), config_.dropout, rng, training);
    Tensor skip = b.res_proj ? (*b.res_proj)(z) : z;
    z = add(branch, skip);
  }
  return z;
}

Tensor AptcnNet::tcn_forward(const Tensor& o, std::mt19937_64& rng, bool training) const {
  Tensor z = tcn_feature_map(o, rng, training);
  return time_slice(z, z.dim(1) - 1);
}

Tensor AptcnNet::forward(const Tensor& p, std::mt19937_64& rng, bool training) const {
  Tensor pruned = prune_channels(p);
  if (config_.use_eca) {
    auto [enhanced, score] = eca(pruned);
    return tcn_forward(enhanced, rng, training);
  }
  return tcn_forward(pruned, rng, training);
}

AttentionScore AptcnNet::last_attention(const Tensor& p) const {
  auto [enhanced, score] = eca(prune_channels(p));
  return score;
}

void AptcnNet::register_params(ParamRegistry& reg, const std::string& prefix) const {
  prune_.register_params(reg, prefix + ".prune");
  if (config_.use_eca) reg.add(prefix + ".eca.w", eca_weights_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const std::string bp = prefix + ".block" + std::to_string(i);
    blocks_[i].conv1.register_params(reg, bp + ".conv1");
    blocks_[i].conv2.register_params(reg, bp + ".conv2");
    if (blocks_[i].res_proj) blocks_[i].res_proj->register_params(reg, bp + ".res");
  }
}

}  // namespace wprcn
