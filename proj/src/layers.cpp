#include "wprcn/layers.hpp"

#include <cmath>

namespace wprcn {

Tensor glorot(Shape shape, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor t(std::move(shape), 0.0, true);
  for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = dist(rng);
  return t;
}

Linear::Linear(std::size_t in, std::size_t out, std::mt19937_64& rng)
    : w(glorot({out, in}, in, out, rng)), b(Tensor({out}, 0.0, true)) {}

void Linear::register_params(ParamRegistry& reg, const std::string& prefix) const {
  reg.add(prefix + ".w", w);
  reg.add(prefix + ".b", b);
}

Conv1dCausal::Conv1dCausal(std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
                           std::size_t dilation, std::mt19937_64& rng)
    : w(glorot({out_ch, in_ch, kernel}, in_ch * kernel, out_ch * kernel, rng)),
      b(Tensor({out_ch}, 0.0, true)),
      dilation(dilation) {
  check(dilation >= 1, "conv1d: dilation must be positive");
}

void Conv1dCausal::register_params(ParamRegistry& reg, const std::string& prefix) const {
  reg.add(prefix + ".w", w);
  reg.add(prefix + ".b", b);
}

BatchNorm1d::BatchNorm1d(std::size_t ch)
    : gamma(Tensor({ch}, 1.0, true)), beta(Tensor({ch}, 0.0, true)) {}

void BatchNorm1d::register_params(ParamRegistry& reg, const std::string& prefix) const {
  reg.add(prefix + ".gamma", gamma);
  reg.add(prefix + ".beta", beta);
}

GruLayer::GruLayer(std::size_t in, std::size_t hidden, std::mt19937_64& rng)
    : wz(glorot({hidden, in}, in, hidden, rng)),
      uz(glorot({hidden, hidden}, hidden, hidden, rng)),
      bz(Tensor({hidden}, 0.0, true)),
      wr(glorot({hidden, in}, in, hidden, rng)),
      ur(glorot({hidden, hidden}, hidden, hidden, rng)),
      br(Tensor({hidden}, 0.0, true)),
      wn(glorot({hidden, in}, in, hidden, rng)),
      un(glorot({hidden, hidden}, hidden, hidden, rng)),
      bn(Tensor({hidden}, 0.0, true)),
      n_in(in),
      n_hidden(hidden) {}

std::pair<Tensor, Tensor> GruLayer::forward(const Tensor& x_seq, const Tensor& h0) const {
  check(x_seq.ndim() == 2 && x_seq.dim(1) == n_in,
        "gru: input must be [L x " + std::to_string(n_in) + "]");
  check(h0.size() == n_hidden, "gru: initial state extent mismatch");
  const std::size_t L = x_seq.dim(0);
  check(L >= 1, "gru: empty sequence");
  Tensor h = h0;
  std::vector<Tensor> outputs;
  outputs.reserve(L);
  for (std::size_t t = 0; t < L; ++t) {
    Tensor xt = row(x_seq, t);
    Tensor z = logistic(add(add(matvec(wz, xt), matvec(uz, h)), bz));
    Tensor r = logistic(add(add(matvec(wr, xt), matvec(ur, h)), br));
    Tensor cand = tanh_op(add(add(matvec(wn, xt), mul(r, matvec(un, h))), bn));
    // h' = (1 - z) * cand + z * h
    h = add(sub(cand, mul(z, cand)), mul(z, h));
    outputs.push_back(h);
  }
  return {stack_rows(outputs), h};
}

std::pair<Tensor, Tensor> GruLayer::forward(const Tensor& x_seq) const {
  return forward(x_seq, Tensor({n_hidden}, 0.0));
}

void GruLayer::register_params(ParamRegistry& reg, const std::string& prefix) const {
  reg.add(prefix + ".wz", wz);
  reg.add(prefix + ".uz", uz);
  reg.add(prefix + ".bz", bz);
  reg.add(prefix + ".wr", wr);
  reg.add(prefix + ".ur", ur);
  reg.add(prefix + ".br", br);
  reg.add(prefix + ".wn", wn);
  reg.add(prefix + ".un", un);
  reg.add(prefix + ".bn", bn);
}

LstmLayer::LstmLayer(std::size_t in, std::size_t hidden, std::mt19937_64& rng)
    : wi(glorot({hidden, in}, in, hidden, rng)),
      ui(glorot({hidden, hidden}, hidden, hidden, rng)),
      bi(Tensor({hidden}, 0.0, true)),
      wf(glorot({hidden, in}, in, hidden, rng)),
      uf(glorot({hidden, hidden}, hidden, hidden, rng)),
      bf(Tensor({hidden}, 0.0, true)),
      wg(glorot({hidden, in}, in, hidden, rng)),
      ug(glorot({hidden, hidden}, hidden, hidden, rng)),
      bg(Tensor({hidden}, 0.0, true)),
      wo(glorot({hidden, in}, in, hidden, rng)),
      uo(glorot({hidden, hidden}, hidden, hidden, rng)),
      bo(Tensor({hidden}, 0.0, true)),
      n_in(in),
      n_hidden(hidden) {}

std::pair<Tensor, Tensor> LstmLayer::forward(const Tensor& x_seq, const Tensor& h0,
                                             const Tensor& c0) const {
  check(x_seq.ndim() == 2 && x_seq.dim(1) == n_in,
        "lstm: input must be [L x " + std::to_string(n_in) + "]");
  check(h0.size() == n_hidden && c0.size() == n_hidden, "lstm: state extent mismatch");
  const std::size_t L = x_seq.dim(0);
  check(L >= 1, "lstm: empty sequence");
  Tensor h = h0;
  Tensor c = c0;
  std::vector<Tensor> outputs;
  outputs.reserve(L);
  for (std::size_t t = 0; t < L; ++t) {
    Tensor xt = row(x_seq, t);
    Tensor i = logistic(add(add(matvec(wi, xt), matvec(ui, h)), bi));
    Tensor f = logistic(add(add(matvec(wf, xt), matvec(uf, h)), bf));
    Tensor g = tanh_op(add(add(matvec(wg, xt), matvec(ug, h)), bg));
    Tensor o = logistic(add(add(matvec(wo, xt), matvec(uo, h)), bo));
    c = add(mul(f, c), mul(i, g));
    h = mul(o, tanh_op(c));
    outputs.push_back(h);
  }
  return {stack_rows(outputs), h};
}

std::pair<Tensor, Tensor> LstmLayer::forward(const Tensor& x_seq) const {
  return forward(x_seq, Tensor({n_hidden}, 0.0), Tensor({n_hidden}, 0.0));
}

void LstmLayer::register_params(ParamRegistry& reg, const std::string& prefix) const {
  reg.add(prefix + ".wi", wi);
  reg.add(prefix + ".ui", ui);
  reg.add(prefix + ".bi", bi);
  reg.add(prefix + ".wf", wf);
  reg.add(prefix + ".uf", uf);
  reg.add(prefix + ".bf", bf);
  reg.add(prefix + ".wg", wg);
  reg.add(prefix + ".ug", ug);
  reg.add(prefix + ".bg", bg);
  reg.add(prefix + ".wo", wo);
  reg.add(prefix + ".uo", uo);
  reg.add(prefix + ".bo", bo);
}

}  // namespace wprcn
