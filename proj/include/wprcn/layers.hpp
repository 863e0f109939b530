#pragma once

#include <map>
#include <random>
#include <string>

#include "wprcn/ops.hpp"
#include "wprcn/tensor.hpp"

namespace wprcn {

// Flat registry of named trainable tensors; the optimizer and the checkpoint
// writer iterate it in registration order.
struct ParamRegistry {
  std::vector<std::pair<std::string, Tensor>> items;

  void add(const std::string& name, const Tensor& t) { items.emplace_back(name, t); }
  void zero_grad() {
    for (auto& [name, t] : items) t.zero_grad();
  }
  std::size_t count() const {
    std::size_t n = 0;
    for (const auto& [name, t] : items) n += t.size();
    return n;
  }
  bool contains_node(const TensorNode* n) const {
    for (const auto& [name, t] : items)
      if (t.node().get() == n) return true;
    return false;
  }
};

// Uniform Glorot-style fan-based initialization, seeded.
Tensor glorot(Shape shape, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng);

struct Linear {
  Tensor w, b;
  Linear() = default;
  Linear(std::size_t in, std::size_t out, std::mt19937_64& rng);
  Tensor operator()(const Tensor& x) const { return affine(w, x, b); }
  void register_params(ParamRegistry& reg, const std::string& prefix) const;
};

struct Conv1dCausal {
  Tensor w, b;  // w: [out x in x K]
  std::size_t dilation = 1;
  Conv1dCausal() = default;
  Conv1dCausal(std::size_t in_ch, std::size_t out_ch, std::size_t kernel, std::size_t dilation,
               std::mt19937_64& rng);
  Tensor operator()(const Tensor& x) const { return conv1d_causal(x, w, b, dilation); }
  void register_params(ParamRegistry& reg, const std::string& prefix) const;
};

struct BatchNorm1d {
  Tensor gamma, beta;
  mutable BatchNormState state;
  BatchNorm1d() = default;
  explicit BatchNorm1d(std::size_t ch);
  Tensor operator()(const Tensor& x, bool training) const {
    return batchnorm(x, gamma, beta, state, training);
  }
  void register_params(ParamRegistry& reg, const std::string& prefix) const;
};

// Gated recurrent unit over a [L x n_in] sequence. Gate conventions follow
// the usual z/r/candidate form: with all-zero parameters z = r = 0.5 and the
// candidate is 0, so the hidden state stays at zero.
struct GruLayer {
  Tensor wz, uz, bz;  // update gate
  Tensor wr, ur, br;  // reset gate
  Tensor wn, un, bn;  // candidate
  std::size_t n_in = 0, n_hidden = 0;
  GruLayer() = default;
  GruLayer(std::size_t in, std::size_t hidden, std::mt19937_64& rng);
  // Returns (y_seq [L x hidden], h_L [hidden]).
  std::pair<Tensor, Tensor> forward(const Tensor& x_seq, const Tensor& h0) const;
  std::pair<Tensor, Tensor> forward(const Tensor& x_seq) const;
  void register_params(ParamRegistry& reg, const std::string& prefix) const;
};

struct LstmLayer {
  Tensor wi, ui, bi;
  Tensor wf, uf, bf;
  Tensor wg, ug, bg;
  Tensor wo, uo, bo;
  std::size_t n_in = 0, n_hidden = 0;
  LstmLayer() = default;
  LstmLayer(std::size_t in, std::size_t hidden, std::mt19937_64& rng);
  std::pair<Tensor, Tensor> forward(const Tensor& x_seq, const Tensor& h0,
                                    const Tensor& c0) const;
  std::pair<Tensor, Tensor> forward(const Tensor& x_seq) const;
  void register_params(ParamRegistry& reg, const std::string& prefix) const;
};

}  // namespace wprcn
