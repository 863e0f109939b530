#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace wprcn {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

// One record of the backward graph. Children hold shared_ptrs to parents,
// so dropping the loss tensor frees the whole graph while leaf parameters
// (held elsewhere) survive.
struct TensorNode {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // allocated on first use
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorNode>> parents;
  // Pulls this node's grad into the parents' grads.
  std::function<void(TensorNode&)> backprop;

  std::vector<double>& grad_buf() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
    return grad;
  }
};

// Dense 64-bit tensor with reverse-mode autodiff. Copying shares the
// underlying node; values are treated as immutable once an op has consumed
// them (only the optimizer writes into leaf values, outside any graph).
class Tensor {
 public:
  Tensor() : n_(std::make_shared<TensorNode>()) {}
  explicit Tensor(Shape shape, double fill = 0.0, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double v);

  const Shape& shape() const { return n_->shape; }
  std::size_t size() const { return n_->value.size(); }
  std::size_t dim(std::size_t i) const { return n_->shape.at(i); }
  std::size_t ndim() const { return n_->shape.size(); }

  double* data() { return n_->value.data(); }
  const double* data() const { return n_->value.data(); }
  std::vector<double>& values() { return n_->value; }
  const std::vector<double>& values() const { return n_->value; }

  double& operator()(std::size_t i) { return n_->value[i]; }
  double operator()(std::size_t i) const { return n_->value[i]; }
  double& operator()(std::size_t i, std::size_t j) { return n_->value[i * n_->shape[1] + j]; }
  double operator()(std::size_t i, std::size_t j) const { return n_->value[i * n_->shape[1] + j]; }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return n_->value[(i * n_->shape[1] + j) * n_->shape[2] + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return n_->value[(i * n_->shape[1] + j) * n_->shape[2] + k];
  }

  double item() const;

  bool requires_grad() const { return n_->requires_grad; }
  void set_requires_grad(bool b) { n_->requires_grad = b; }
  std::vector<double>& grad() { return n_->grad_buf(); }
  const std::vector<double>& grad() const { return n_->grad; }
  void zero_grad() {
    if (!n_->grad.empty()) std::fill(n_->grad.begin(), n_->grad.end(), 0.0);
  }

  // Reverse-mode pass from a scalar root; accumulates into every
  // requires_grad leaf reachable from here.
  void backward();

  std::shared_ptr<TensorNode> node() const { return n_; }
  explicit Tensor(std::shared_ptr<TensorNode> n) : n_(std::move(n)) {}

 private:
  std::shared_ptr<TensorNode> n_;
};

// Graph-building helper shared by all ops. Parents and the backprop hook are
// only attached when some parent needs gradients, so inference-time code
// builds no graph at all.
Tensor make_op(Shape shape, std::vector<double> value, std::vector<Tensor> parents,
               std::function<void(TensorNode&)> backprop);

inline void check(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace wprcn
