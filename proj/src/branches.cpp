#include "wprcn/branches.hpp"

#include "wprcn/ops.hpp"

namespace wprcn {

SeBlock::SeBlock(std::size_t channels, std::size_t reduction, std::mt19937_64& rng)
    : channels(channels) {
  check(channels >= 1 && reduction >= 1, "se: bad configuration");
  const std::size_t bottleneck = (channels + reduction - 1) / reduction;  // pad up
  w1 = glorot({bottleneck, channels}, channels, bottleneck, rng);
  w2 = glorot({channels, bottleneck}, bottleneck, channels, rng);
}

Tensor SeBlock::scores(const Tensor& x, std::size_t true_len) const {
  Tensor gap = true_len == 0 ? global_avg_pool(x) : masked_avg_pool(x, true_len);
  return logistic(matvec(w2, relu(matvec(w1, gap))));
}

Tensor SeBlock::operator()(const Tensor& x, std::size_t true_len) const {
  return scale_channels(x, scores(x, true_len));
}

void SeBlock::register_params(ParamRegistry& reg, const std::string& prefix) const {
  reg.add(prefix + ".w1", w1);
  reg.add(prefix + ".w2", w2);
}

CfcnBranch::CfcnBranch(std::size_t input_dim, const CfcnConfig& config, std::mt19937_64& rng)
    : config_(config),
      conv1_(input_dim, config.channels[0], config.kernels[0], 1, rng),
      conv2_(config.channels[0], config.channels[1], config.kernels[1], 1, rng),
      conv3_(config.channels[1], config.channels[2], config.kernels[2], 1, rng),
      bn1_(config.channels[0]),
      bn2_(config.channels[1]),
      bn3_(config.channels[2]),
      se1_(config.channels[0], config.se_reduction, rng),
      se2_(config.channels[1], config.se_reduction, rng) {}

Tensor CfcnBranch::feature_map(const Tensor& x, bool training, std::size_t true_len,
                               bool with_se) const {
  Tensor h = relu(bn1_(conv1_(x), training));
  if (with_se) h = se1_(h, true_len);
  h = relu(bn2_(conv2_(h), training));
  if (with_se) h = se2_(h, true_len);
  return relu(bn3_(conv3_(h), training));
}

Tensor CfcnBranch::forward(const Tensor& x, bool training, std::size_t true_len) const {
  return masked_avg_pool(feature_map(x, training, true_len), true_len);
}

std::vector<BatchNormState*> CfcnBranch::bn_states() const {
  return {&bn1_.state, &bn2_.state, &bn3_.state};
}

void CfcnBranch::register_params(ParamRegistry& reg, const std::string& prefix) const {
  conv1_.register_params(reg, prefix + ".conv1");
  bn1_.register_params(reg, prefix + ".bn1");
  se1_.register_params(reg, prefix + ".se1");
  conv2_.register_params(reg, prefix + ".conv2");
  bn2_.register_params(reg, prefix + ".bn2");
  se2_.register_params(reg, prefix + ".se2");
  conv3_.register_params(reg, prefix + ".conv3");
  bn3_.register_params(reg, prefix + ".bn3");
}

LstmBranch::LstmBranch(std::size_t input_dim, std::size_t hidden, double dropout_p,
                       std::mt19937_64& rng)
    : lstm_(input_dim, hidden, rng), dropout_p_(dropout_p) {}

Tensor LstmBranch::forward(const Tensor& x, std::mt19937_64& rng, bool training) const {
  auto [y_seq, h_l] = lstm_.forward(transpose(x));
  return dropout(h_l, dropout_p_, rng, training);
}

void LstmBranch::register_params(ParamRegistry& reg, const std::string& prefix) const {
  lstm_.register_params(reg, prefix + ".lstm");
}

}  // namespace wprcn
