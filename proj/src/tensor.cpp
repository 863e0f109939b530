#include "wprcn/tensor.hpp"

#include <algorithm>
#include <unordered_set>

namespace wprcn {

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor::Tensor(Shape shape, double fill, bool requires_grad)
    : n_(std::make_shared<TensorNode>()) {
  n_->shape = std::move(shape);
  n_->value.assign(numel(n_->shape), fill);
  n_->requires_grad = requires_grad;
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
  check(numel(shape) == values.size(),
        "tensor: " + shape_str(shape) + " does not hold " + std::to_string(values.size()) +
            " values");
  Tensor t;
  t.n_->shape = std::move(shape);
  t.n_->value = std::move(values);
  t.n_->requires_grad = requires_grad;
  return t;
}

Tensor Tensor::scalar(double v) { return from({}, {v}); }

double Tensor::item() const {
  check(n_->value.size() == 1, "item(): tensor has " + std::to_string(n_->value.size()) +
                                   " elements");
  return n_->value[0];
}

void Tensor::backward() {
  check(n_->value.size() == 1, "backward(): root must be scalar");
  // Iterative post-order DFS for a topological order over the graph.
  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> seen;
  std::vector<std::pair<TensorNode*, std::size_t>> stack;
  stack.emplace_back(n_.get(), 0);
  seen.insert(n_.get());
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->parents.size()) {
      TensorNode* p = node->parents[idx++].get();
      if (p->backprop && !seen.count(p)) {
        seen.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  n_->grad_buf()[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backprop) (*it)->backprop(**it);
  }
}

Tensor make_op(Shape shape, std::vector<double> value, std::vector<Tensor> parents,
               std::function<void(TensorNode&)> backprop) {
  Tensor out = Tensor::from(std::move(shape), std::move(value));
  bool needs = false;
  for (const auto& p : parents)
    if (p.requires_grad() || p.node()->backprop) needs = true;
  if (needs) {
    out.node()->requires_grad = true;
    out.node()->parents.reserve(parents.size());
    for (auto& p : parents) out.node()->parents.push_back(p.node());
    out.node()->backprop = std::move(backprop);
  }
  return out;
}

}  // namespace wprcn
