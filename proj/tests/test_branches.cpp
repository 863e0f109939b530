#include <doctest.h>

#include <random>

#include "support/gradcheck.hpp"
#include "wprcn/aptcn.hpp"
#include "wprcn/branches.hpp"
#include "wprcn/ops.hpp"
#include "wprcn/rng.hpp"

using namespace wprcn;

namespace {

Tensor random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = dist(rng);
  return t;
}

}  // namespace

TEST_CASE("se block scores and scaling") {
  auto rng = make_rng(3);
  SeBlock se(6, 2, rng);
  Tensor x = random_tensor({6, 10}, rng);
  {
    SeBlock zeroed = se;
    std::fill(zeroed.w1.values().begin(), zeroed.w1.values().end(), 0.0);
    std::fill(zeroed.w2.values().begin(), zeroed.w2.values().end(), 0.0);
    Tensor y = zeroed(x);
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(y.data()[i] == doctest::Approx(x.data()[i] * 0.5));
  }
  Tensor omega = se.scores(x);
  for (std::size_t c = 0; c < 6; ++c) {
    CHECK(omega(c) > 0.0);
    CHECK(omega(c) < 1.0);
  }
}

TEST_CASE("se block is equivariant under channel permutation") {
  auto rng = make_rng(5);
  const std::size_t ch = 4;
  SeBlock se(ch, 2, rng);
  Tensor x = random_tensor({ch, 7}, rng);
  Tensor y = se(x);

  // rotate channels by one and permute the parameter columns/rows to match
  std::vector<std::size_t> perm = {1, 2, 3, 0};
  Tensor xp({ch, 7});
  for (std::size_t c = 0; c < ch; ++c)
    for (std::size_t t = 0; t < 7; ++t) xp(c, t) = x(perm[c], t);
  SeBlock sep = se;
  sep.w1 = Tensor(se.w1.shape());
  sep.w2 = Tensor(se.w2.shape());
  const std::size_t bott = se.w1.dim(0);
  for (std::size_t b = 0; b < bott; ++b)
    for (std::size_t c = 0; c < ch; ++c) sep.w1(b, c) = se.w1(b, perm[c]);
  for (std::size_t c = 0; c < ch; ++c)
    for (std::size_t b = 0; b < bott; ++b) sep.w2(c, b) = se.w2(perm[c], b);
  Tensor yp = sep(xp);
  for (std::size_t c = 0; c < ch; ++c)
    for (std::size_t t = 0; t < 7; ++t)
      CHECK(yp(c, t) == doctest::Approx(y(perm[c], t)).epsilon(1e-12));
}

TEST_CASE("se uses strictly more parameters than eca at equal channels") {
  auto rng = make_rng(7);
  const std::size_t ch = 16;
  SeBlock se(ch, 4, rng);
  ParamRegistry se_reg;
  se.register_params(se_reg, "se");

  AptcnConfig cfg;
  cfg.in_channels = ch;
  cfg.pruned_channels = ch;
  cfg.eca_kernel = 3;
  cfg.level_channels = 4;
  cfg.depth = 1;
  AptcnNet net(cfg, rng);
  ParamRegistry eca_reg;
  net.register_params(eca_reg, "net");
  std::size_t eca_count = 0;
  for (const auto& [name, t] : eca_reg.items)
    if (name.find("eca") != std::string::npos) eca_count += t.size();
  CHECK(eca_count == 3);
  CHECK(se_reg.count() > eca_count);
}

TEST_CASE("cfcn branch output extent and causal prefix stability") {
  auto rng = make_rng(11);
  CfcnConfig cfg;  // the stock (128, 256, 128) / (8, 5, 3) stack
  CfcnBranch branch(2, cfg, rng);
  Tensor x = random_tensor({2, 12}, rng, 0.0, 1.0);
  Tensor f = branch.forward(x, false, 12);
  CHECK(f.shape() == Shape{128});

  // eval mode with mask-aware pooling: extending the tail with zeros cannot
  // move earlier features
  Tensor longer({2, 16}, 0.0);
  for (std::size_t d = 0; d < 2; ++d)
    for (std::size_t t = 0; t < 12; ++t) longer(d, t) = x(d, t);
  Tensor map_short = branch.feature_map(x, false, 12);
  Tensor map_long = branch.feature_map(longer, false, 12);
  for (std::size_t c = 0; c < 128; ++c)
    for (std::size_t t = 0; t < 12; ++t) CHECK(map_long(c, t) == map_short(c, t));

  // mask-aware GAP normalizes by the true length, not the padded one
  Tensor f_long = branch.forward(longer, false, 12);
  for (std::size_t c = 0; c < 128; ++c) CHECK(f_long(c) == doctest::Approx(f(c)).epsilon(1e-12));
}

TEST_CASE("cfcn conv path is strictly causal pre-pooling") {
  auto rng = make_rng(13);
  CfcnConfig cfg;
  cfg.channels = {8, 16, 8};
  CfcnBranch branch(2, cfg, rng);
  Tensor x = random_tensor({2, 20}, rng, 0.0, 1.0);
  // SE gating is squeeze(GAP)-scoped, i.e. one whole-sequence scalar per
  // channel, so the bit-exact check runs on the causal conv/BN/ReLU path.
  Tensor base = branch.feature_map(x, false, 20, false);
  Tensor xp = Tensor::from(x.shape(), x.values());
  xp(0, 9) += 0.3;
  Tensor pert = branch.feature_map(xp, false, 20, false);
  for (std::size_t c = 0; c < 8; ++c)
    for (std::size_t t = 0; t < 9; ++t) CHECK(pert(c, t) == base(c, t));
  // the perturbation does land at and after its own timestep
  bool visible = false;
  for (std::size_t c = 0; c < 8; ++c)
    if (pert(c, 9) != base(c, 9)) visible = true;
  CHECK(visible);
}

TEST_CASE("cfcn gradient on a small variant") {
  auto rng = make_rng(17);
  CfcnConfig cfg;
  cfg.channels = {8, 16, 8};
  cfg.se_reduction = 4;
  CfcnBranch branch(2, cfg, rng);
  Tensor x = random_tensor({2, 10}, rng, 0.0, 1.0);
  ParamRegistry reg;
  branch.register_params(reg, "cfcn");
  std::vector<Tensor> params;
  for (auto& [name, t] : reg.items) params.push_back(t);
  params.push_back(x);
  double err = wprcn::testing::max_rel_grad_error(
      [&] {
        Tensor f = branch.forward(x, true, 10);
        return sum(mul(f, f));
      },
      params);
  CHECK(err <= 1e-4);
}

TEST_CASE("lstm branch extent, channel sensitivity, determinism") {
  auto rng = make_rng(19);
  LstmBranch branch(3, 5, 0.0, rng);
  Tensor x = random_tensor({3, 14}, rng, 0.0, 1.0);
  auto d1 = make_rng(4), d2 = make_rng(4);
  Tensor f1 = branch.forward(x, d1, false);
  Tensor f2 = branch.forward(x, d2, false);
  CHECK(f1.shape() == Shape{5});
  for (std::size_t i = 0; i < 5; ++i) CHECK(f1(i) == f2(i));

  // no dimension shuffle: swapping feature channels changes the output
  Tensor swapped({3, 14});
  for (std::size_t t = 0; t < 14; ++t) {
    swapped(0, t) = x(1, t);
    swapped(1, t) = x(0, t);
    swapped(2, t) = x(2, t);
  }
  Tensor fs = branch.forward(swapped, d1, false);
  bool any_diff = false;
  for (std::size_t i = 0; i < 5; ++i)
    if (fs(i) != f1(i)) any_diff = true;
  CHECK(any_diff);
}
