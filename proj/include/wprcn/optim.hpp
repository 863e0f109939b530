#pragma once

#include "wprcn/layers.hpp"

namespace wprcn {

// Plain gradient descent with optional momentum.
class Sgd {
 public:
  explicit Sgd(double lr, double momentum = 0.0) : lr_(lr), momentum_(momentum) {}
  void step(ParamRegistry& params);

 private:
  double lr_;
  double momentum_;
  std::vector<std::vector<double>> velocity_;
};

class Adam {
 public:
  explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
  void step(ParamRegistry& params);

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace wprcn
