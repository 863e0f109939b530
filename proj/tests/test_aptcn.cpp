#include <doctest.h>

#include <random>

#include "support/gradcheck.hpp"
#include "wprcn/aptcn.hpp"
#include "wprcn/ops.hpp"
#include "wprcn/rng.hpp"

using namespace wprcn;

namespace {

Tensor random_tensor(Shape shape, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = dist(rng);
  return t;
}

AptcnConfig tiny_config() {
  AptcnConfig cfg;
  cfg.in_channels = 15;
  cfg.pruned_channels = 5;
  cfg.eca_kernel = 3;
  cfg.tcn_kernel = 3;
  cfg.depth = 2;
  cfg.level_channels = 4;
  cfg.dropout = 0.0;
  return cfg;
}

}  // namespace

TEST_CASE("config grid validation") {
  AptcnConfig ok;
  ok.validate_grid();
  AptcnConfig bad = ok;
  bad.tcn_kernel = 4;
  CHECK_THROWS_AS(bad.validate_grid(), std::invalid_argument);
  bad = ok;
  bad.depth = 9;
  CHECK_THROWS_AS(bad.validate_grid(), std::invalid_argument);
  bad = ok;
  bad.level_channels = 7;
  CHECK_THROWS_AS(bad.validate_grid(), std::invalid_argument);
  bad = ok;
  bad.eca_kernel = 2;
  CHECK_THROWS_AS(bad.validate_grid(), std::invalid_argument);
}

TEST_CASE("channel pruning selects and mixes pointwise") {
  auto rng = make_rng(3);
  AptcnNet net(tiny_config(), rng);
  Tensor p = random_tensor({15, 10}, rng);

  // identity-like weights passing channels 0..4 straight through
  ParamRegistry reg;
  net.register_params(reg, "net");
  for (auto& [name, t] : reg.items) {
    if (name == "net.prune.w") {
      std::fill(t.values().begin(), t.values().end(), 0.0);
      for (std::size_t c = 0; c < 5; ++c) t(c, c, 0) = 1.0;
    }
    if (name == "net.prune.b") std::fill(t.values().begin(), t.values().end(), 0.0);
  }
  Tensor pruned = net.prune_channels(p);
  CHECK(pruned.shape() == Shape{5, 10});
  for (std::size_t c = 0; c < 5; ++c)
    for (std::size_t t = 0; t < 10; ++t) CHECK(pruned(c, t) == doctest::Approx(p(c, t)));

  // strictly pointwise: a perturbation at t = 3 cannot move other timesteps
  Tensor p2 = Tensor::from(p.shape(), p.values());
  p2(7, 3) += 2.0;
  Tensor pruned2 = net.prune_channels(p2);
  for (std::size_t c = 0; c < 5; ++c)
    for (std::size_t t = 0; t < 10; ++t)
      if (t != 3) CHECK(pruned2(c, t) == pruned(c, t));

  CHECK_THROWS_AS(net.prune_channels(Tensor({4, 10})), std::invalid_argument);
}

TEST_CASE("eca attention values and locality") {
  auto rng = make_rng(5);
  AptcnNet net(tiny_config(), rng);
  Tensor pruned = random_tensor({5, 12}, rng);

  {
    // zero attention kernel: a = 0.5 everywhere, output halved
    AptcnNet zeroed(tiny_config(), rng);
    ParamRegistry reg;
    zeroed.register_params(reg, "net");
    for (auto& [name, t] : reg.items)
      if (name == "net.eca.w") std::fill(t.values().begin(), t.values().end(), 0.0);
    auto [o, score] = zeroed.eca(pruned);
    for (double a : score.a) CHECK(a == doctest::Approx(0.5));
    for (std::size_t i = 0; i < o.size(); ++i)
      CHECK(o.data()[i] == doctest::Approx(pruned.data()[i] * 0.5));
  }

  auto [o, score] = net.eca(pruned);
  REQUIRE(score.a.size() == 5);
  for (double a : score.a) {
    CHECK(a > 0.0);
    CHECK(a < 1.0);
  }

  // scaling one channel changes only that channel's GAP entry
  Tensor gap1 = global_avg_pool(pruned);
  Tensor scaled = Tensor::from(pruned.shape(), pruned.values());
  for (std::size_t t = 0; t < 12; ++t) scaled(2, t) *= 10.0;
  Tensor gap2 = global_avg_pool(scaled);
  for (std::size_t c = 0; c < 5; ++c) {
    if (c == 2)
      CHECK(gap2(c) != gap1(c));
    else
      CHECK(gap2(c) == gap1(c));
  }
}

TEST_CASE("attention is one vector shared across timesteps") {
  auto rng = make_rng(7);
  AptcnNet net(tiny_config(), rng);
  Tensor pruned = random_tensor({5, 9}, rng);
  auto [o, score] = net.eca(pruned);
  for (std::size_t c = 0; c < 5; ++c)
    for (std::size_t t = 0; t < 9; ++t)
      CHECK(o(c, t) == doctest::Approx(pruned(c, t) * score.a[c]));
}

TEST_CASE("tcn residual block with zeroed branches is the identity") {
  AptcnConfig cfg = tiny_config();
  cfg.pruned_channels = 4;  // match level channels so the skip is the identity
  cfg.level_channels = 4;
  cfg.depth = 1;
  auto rng = make_rng(9);
  AptcnNet net(cfg, rng);
  ParamRegistry reg;
  net.register_params(reg, "net");
  for (auto& [name, t] : reg.items)
    if (name.find("block0") != std::string::npos)
      std::fill(t.values().begin(), t.values().end(), 0.0);
  Tensor o = random_tensor({4, 8}, rng, -1.0, 1.0);
  auto drop = make_rng(1);
  Tensor map = net.tcn_feature_map(o, drop, false);
  for (std::size_t i = 0; i < o.size(); ++i) CHECK(map.data()[i] == o.data()[i]);
}

TEST_CASE("tcn stack is strictly causal with the stated receptive field") {
  AptcnConfig cfg = tiny_config();
  cfg.pruned_channels = 3;
  cfg.level_channels = 3;
  cfg.tcn_kernel = 3;
  cfg.depth = 3;
  CHECK(cfg.receptive_field() == 29);

  auto rng = make_rng(11);
  AptcnNet net(cfg, rng);
  // Positive weights and inputs keep every ReLU active, so the single path
  // from the receptive-field boundary cannot be masked out.
  ParamRegistry all;
  net.register_params(all, "net");
  for (auto& [name, t] : all.items)
    for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = std::abs(t.data()[i]) + 0.05;
  const std::size_t L = 40;
  Tensor o = random_tensor({3, L}, rng, 0.1, 1.0);
  auto drop = make_rng(1);
  Tensor base = net.tcn_feature_map(o, drop, false);

  // causality: outputs strictly before the perturbation are bit-identical
  Tensor o2 = Tensor::from(o.shape(), o.values());
  o2(1, 20) += 0.5;
  Tensor pert = net.tcn_feature_map(o2, drop, false);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t t = 0; t < 20; ++t) CHECK(pert(c, t) == base(c, t));

  // receptive field: the last output reacts to index L-RF but not L-RF-1
  const std::size_t rf = cfg.receptive_field();
  REQUIRE(L >= rf + 2);
  auto influences_last = [&](std::size_t idx) {
    Tensor probe = Tensor::from(o.shape(), o.values());
    probe(0, idx) += 1.0;
    Tensor out = net.tcn_feature_map(probe, drop, false);
    for (std::size_t c = 0; c < 3; ++c)
      if (out(c, L - 1) != base(c, L - 1)) return true;
    return false;
  };
  CHECK(influences_last(L - rf));
  CHECK_FALSE(influences_last(L - rf - 1));
}

TEST_CASE("forward composition: extents, determinism, ablated attention") {
  auto rng = make_rng(13);
  AptcnConfig cfg = tiny_config();
  AptcnNet net(cfg, rng);
  Tensor p = random_tensor({15, 10}, rng);
  auto d1 = make_rng(2), d2 = make_rng(2);
  Tensor y1 = net.forward(p, d1, false);
  Tensor y2 = net.forward(p, d2, false);
  CHECK(y1.shape() == Shape{cfg.level_channels});
  for (std::size_t i = 0; i < y1.size(); ++i) CHECK(y1(i) == y2(i));

  // ablation: no attention parameters are registered when ECA is off
  AptcnConfig no_eca = cfg;
  no_eca.use_eca = false;
  AptcnNet ablated(no_eca, rng);
  ParamRegistry reg;
  ablated.register_params(reg, "net");
  for (const auto& [name, t] : reg.items) CHECK(name.find("eca") == std::string::npos);
}

TEST_CASE("gradients flow through the whole composition") {
  auto rng = make_rng(17);
  AptcnConfig cfg = tiny_config();
  cfg.depth = 2;
  AptcnNet net(cfg, rng);
  Tensor p = random_tensor({15, 6}, rng);
  ParamRegistry reg;
  net.register_params(reg, "net");
  std::vector<Tensor> params;
  for (auto& [name, t] : reg.items) params.push_back(t);
  params.push_back(p);
  auto drop = make_rng(0);
  double err = wprcn::testing::max_rel_grad_error(
      [&] { return sum(mul(net.forward(p, drop, false), net.forward(p, drop, false))); },
      params);
  CHECK(err <= 1e-4);
}
