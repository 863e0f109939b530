#include "wprcn/optim.hpp"

#include <cmath>

namespace wprcn {

void Sgd::step(ParamRegistry& params) {
  if (velocity_.size() != params.items.size()) {
    velocity_.clear();
    for (const auto& [name, t] : params.items) velocity_.emplace_back(t.size(), 0.0);
  }
  for (std::size_t i = 0; i < params.items.size(); ++i) {
    Tensor& t = params.items[i].second;
    if (t.grad().size() != t.size()) continue;
    auto& vel = velocity_[i];
    for (std::size_t j = 0; j < t.size(); ++j) {
      vel[j] = momentum_ * vel[j] + t.grad()[j];
      t.data()[j] -= lr_ * vel[j];
    }
  }
}

void Adam::step(ParamRegistry& params) {
  if (m_.size() != params.items.size()) {
    m_.clear();
    v_.clear();
    for (const auto& [name, t] : params.items) {
      m_.emplace_back(t.size(), 0.0);
      v_.emplace_back(t.size(), 0.0);
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.items.size(); ++i) {
    Tensor& t = params.items[i].second;
    if (t.grad().size() != t.size()) continue;
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < t.size(); ++j) {
      const double g = t.grad()[j];
      m[j] = beta1_ * m[j] + (1.0 - beta1_) * g;
      v[j] = beta2_ * v[j] + (1.0 - beta2_) * g * g;
      t.data()[j] -= lr_ * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + eps_);
    }
  }
}

}  // namespace wprcn
