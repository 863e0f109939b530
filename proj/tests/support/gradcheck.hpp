#pragma once

#include <functional>
#include <vector>

#include "wprcn/tensor.hpp"

namespace wprcn::testing {

// Central finite-difference check of reverse-mode gradients. `f` must rebuild
// the graph from the given parameter tensors on every call; it is evaluated
// 2 * (total parameter count) + 1 times.
inline double max_rel_grad_error(const std::function<Tensor()>& f, std::vector<Tensor> params,
                                 double eps = 1e-5) {
  for (auto& p : params) {
    p.set_requires_grad(true);
    p.zero_grad();
  }
  Tensor loss = f();
  loss.backward();
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (auto& p : params) analytic.push_back(p.grad());

  double worst = 0.0;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& p = params[pi];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double keep = p.data()[i];
      p.data()[i] = keep + eps;
      const double up = f().item();
      p.data()[i] = keep - eps;
      const double down = f().item();
      p.data()[i] = keep;
      const double fd = (up - down) / (2.0 * eps);
      const double g = analytic[pi][i];
      const double denom = std::max({1.0, std::abs(fd), std::abs(g)});
      worst = std::max(worst, std::abs(fd - g) / denom);
    }
  }
  return worst;
}

}  // namespace wprcn::testing
