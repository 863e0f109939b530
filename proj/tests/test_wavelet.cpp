#include <doctest.h>

#include <cmath>
#include <random>

#include "wprcn/density.hpp"
#include "wprcn/rng.hpp"

using namespace wprcn;

namespace {
const BSplineOrder kOrders[] = {BSplineOrder::kLinear, BSplineOrder::kQuadratic,
                                BSplineOrder::kCubic};
}

TEST_CASE("b-spline closed-form values") {
  CHECK(bspline_phi(1.0, BSplineOrder::kLinear) == doctest::Approx(1.0));
  CHECK(bspline_phi(1.5, BSplineOrder::kQuadratic) == doctest::Approx(0.75));
  CHECK(bspline_phi(2.0, BSplineOrder::kCubic) == doctest::Approx(2.0 / 3));
  for (auto m : kOrders) {
    CHECK(bspline_phi(-0.5, m) == 0.0);
    CHECK(bspline_phi(static_cast<double>(order_m(m)) + 0.01, m) == 0.0);
  }
}

TEST_CASE("b-spline branch boundaries are continuous") {
  for (auto m : kOrders) {
    for (int b = 0; b <= order_m(m); ++b) {
      const double x = static_cast<double>(b);
      const double left = bspline_phi(std::nextafter(x, -1.0), m);
      const double at = bspline_phi(x, m);
      CHECK(std::abs(left - at) <= 1e-12);
    }
  }
  // The cubic's two middle branches agree at x = 2.
  const double b1 = (-3.0 * 8 + 12.0 * 4 - 12.0 * 2 + 4.0) / 6.0;
  const double b2 = (3.0 * 8 - 24.0 * 4 + 60.0 * 2 - 44.0) / 6.0;
  CHECK(b1 == doctest::Approx(b2));
  CHECK(b1 == doctest::Approx(2.0 / 3));
}

TEST_CASE("b-spline support is exactly [0, m]") {
  auto rng = make_rng(5);
  std::uniform_real_distribution<double> inside(0.01, 0.99);
  for (auto m : kOrders) {
    const double mm = static_cast<double>(order_m(m));
    for (int i = 0; i < 200; ++i) {
      const double x = inside(rng) * mm;
      CHECK(bspline_phi(x, m) > 0.0);
    }
    CHECK(bspline_phi(-1e-12, m) == 0.0);
    CHECK(bspline_phi(mm, m) == 0.0);
    CHECK(bspline_phi(mm + 5.0, m) == 0.0);
  }
}

TEST_CASE("radial scaling function examples") {
  CHECK(radial_phi({0.0}, 0, {0.0}, BSplineOrder::kLinear) == doctest::Approx(1.0));
  CHECK(radial_phi({0.9}, 0, {0.0}, BSplineOrder::kLinear) == doctest::Approx(0.1));
  CHECK(radial_phi({0.5, 0.5}, 1, {1.0, 1.0}, BSplineOrder::kQuadratic) ==
        doctest::Approx(1.5));
  // zero whenever the distance reaches m/2
  CHECK(radial_phi({1.0}, 0, {0.0}, BSplineOrder::kLinear) == 0.0);
}

TEST_CASE("translation grid enumerates the lexicographic lattice") {
  TranslationGrid g(2, 2, BSplineOrder::kLinear);  // u = 1, values -1..5
  CHECK(g.per_dim == 7);
  CHECK(g.count == 49);
  CHECK(g.point(0) == std::vector<int>{-1, -1});
  CHECK(g.point(1) == std::vector<int>{-1, 0});
  CHECK(g.point(7) == std::vector<int>{0, -1});
  CHECK(g.index_of({5, 5}) == 48);

  TranslationGrid c(3, 1, BSplineOrder::kCubic);  // u = 2, values -2..10
  CHECK(c.per_dim == 13);
  CHECK(c.count == 13);
}

TEST_CASE("receptive field set validation") {
  CHECK(ReceptiveFieldSet().alphas.size() == 5);
  CHECK(ReceptiveFieldSet().alphas[0] == 1.0);
  CHECK_THROWS_AS(ReceptiveFieldSet(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(ReceptiveFieldSet({0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(ReceptiveFieldSet({0.5, 0.7}), std::invalid_argument);
  CHECK_THROWS_AS(ReceptiveFieldSet({1.5}), std::invalid_argument);
}

TEST_CASE("phi_vector sparsity, nonnegativity and grid-center value") {
  auto rng = make_rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto m : kOrders) {
    for (std::size_t n : {1u, 2u}) {
      DensityState state(m, 3, n);
      const std::size_t bound = 1;
      std::size_t cap = 1;
      for (std::size_t d = 0; d < n; ++d) cap *= static_cast<std::size_t>(order_m(m) + 1);
      (void)bound;
      for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(n);
        for (auto& v : x) v = unit(rng);
        auto dense = state.phi_vector(x);
        std::size_t nonzero = 0;
        for (double v : dense) {
          CHECK(v >= 0.0);
          if (v != 0.0) ++nonzero;
        }
        CHECK(nonzero <= cap);
        // brute-force scan agrees with the sparse path
        for (std::size_t i = 0; i < dense.size(); ++i) {
          auto k = state.grid().point(i);
          std::vector<double> kd(k.begin(), k.end());
          CHECK(dense[i] == doctest::Approx(radial_phi(x, 3, kd, m)).epsilon(1e-12));
        }
      }
    }
  }

  // exact grid center: that entry equals 2^(n*j0/2) * phi(m/2)
  DensityState state(BSplineOrder::kLinear, 2, 1);
  auto dense = state.phi_vector({0.25});  // 2^2 * 0.25 = 1 = grid point
  const std::size_t idx = state.grid().index_of({1});
  CHECK(dense[idx] == doctest::Approx(2.0 * bspline_phi(1.0, BSplineOrder::kLinear)));
}

TEST_CASE("update with alpha = 1 replaces the column") {
  auto rng = make_rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DensityState state(BSplineOrder::kQuadratic, 2, 2);
  for (int step = 0; step < 5; ++step) {
    std::vector<double> x = {unit(rng), unit(rng)};
    state.update(x);
    auto phi = state.phi_vector(x);
    for (std::size_t l = 0; l < phi.size(); ++l)
      CHECK(state.weight(l, 0) == doctest::Approx(phi[l]).epsilon(1e-14));
  }
}

TEST_CASE("repeated identical input converges geometrically") {
  DensityState state(BSplineOrder::kLinear, 2, 1);
  const std::vector<double> x = {0.4};
  auto phi = state.phi_vector(x);
  const int T = 50;
  for (int t = 0; t < T; ++t) state.update(x);
  const auto& alphas = state.receptive_fields().alphas;
  for (std::size_t g = 0; g < alphas.size(); ++g) {
    const double shrink = std::pow(1.0 - alphas[g], T);
    for (std::size_t l = 0; l < phi.size(); ++l) {
      const double gap = phi[l] - state.weight(l, g);
      CHECK(gap == doctest::Approx(phi[l] * shrink).epsilon(1e-9));
    }
  }
}

TEST_CASE("harmonic streaming equals the batch estimator") {
  auto rng = make_rng(29);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto m : kOrders) {
    for (std::size_t n : {1u, 2u}) {
      for (int j0 : {1, 3}) {
        std::vector<std::vector<double>> samples;
        DensityState stream(m, j0, n, ReceptiveFieldSet({1.0}), /*harmonic=*/true);
        for (int i = 0; i < 500; ++i) {
          std::vector<double> x(n);
          for (auto& v : x) v = unit(rng);
          samples.push_back(x);
          stream.update(x);
        }
        DensityState batch = batch_estimate(samples, m, j0);
        auto ws = stream.weights_dense();
        auto wb = batch.weights_dense();
        REQUIRE(ws.size() == wb.size());
        for (std::size_t i = 0; i < ws.size(); ++i) CHECK(std::abs(ws[i] - wb[i]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("batch estimator is order-free and matches one sample") {
  auto rng = make_rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> samples;
  for (int i = 0; i < 40; ++i) samples.push_back({unit(rng), unit(rng)});

  DensityState one = batch_estimate({samples[0]}, BSplineOrder::kLinear, 2);
  DensityState probe(BSplineOrder::kLinear, 2, 2, ReceptiveFieldSet({1.0}));
  auto phi = probe.phi_vector(samples[0]);
  for (std::size_t l = 0; l < phi.size(); ++l) CHECK(one.weight(l, 0) == phi[l]);

  auto shuffled = samples;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  // permutation only reorders the summation; values stay equal to 1e-12
  auto a = batch_estimate(samples, BSplineOrder::kLinear, 2).weights_dense();
  auto b = batch_estimate(shuffled, BSplineOrder::kLinear, 2).weights_dense();
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12);
}

TEST_CASE("density values: zeros, single update, nonnegativity") {
  auto rng = make_rng(37);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DensityState state(BSplineOrder::kQuadratic, 3, 2);
  std::vector<double> x = {unit(rng), unit(rng)};
  for (double v : state.density(x)) CHECK(v == 0.0);

  state.update(x);
  auto phi = state.phi_vector(x);
  double sq = 0.0;
  for (double v : phi) sq += v * v;
  CHECK(state.density(x)[0] == doctest::Approx(sq).epsilon(1e-12));

  for (int i = 0; i < 200; ++i) {
    std::vector<double> y = {unit(rng), unit(rng)};
    state.update(y);
    for (double v : state.density(y)) CHECK(v >= 0.0);
  }
}

TEST_CASE("density update rejects dimension mismatch") {
  DensityState state(BSplineOrder::kLinear, 2, 2);
  CHECK_THROWS_AS(state.update({0.5}), std::invalid_argument);
  CHECK_THROWS_AS(state.density({0.5, 0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("inputs outside the unit cube are clamped") {
  DensityState a(BSplineOrder::kLinear, 2, 1);
  DensityState b(BSplineOrder::kLinear, 2, 1);
  a.update({1.7});
  b.update({1.0});
  auto wa = a.weights_dense();
  auto wb = b.weights_dense();
  for (std::size_t i = 0; i < wa.size(); ++i) CHECK(wa[i] == wb[i]);
}

TEST_CASE("1-d partition of unity over the translation grid") {
  auto rng = make_rng(41);
  for (auto m : kOrders) {
    const int u = order_margin(m);
    for (int j0 = 1; j0 <= 5; ++j0) {
      const double margin = static_cast<double>(u) / std::ldexp(1.0, j0);
      double lo = margin, hi = 1.0 - margin;
      if (lo >= hi) {
        lo = 0.0;
        hi = 1.0;
      }
      std::uniform_real_distribution<double> dist(lo, hi);
      for (int trial = 0; trial < 50; ++trial) {
        const double x = dist(rng);
        double s = 0.0;
        for (int k = -u; k <= (1 << j0) + u; ++k)
          s += bspline_phi(std::ldexp(1.0, j0) * x - k + 0.5 * order_m(m), m);
        CHECK(std::abs(s - 1.0) <= 1e-10);
      }
    }
  }
}

TEST_CASE("streaming update cost does not grow with prior updates") {
  auto rng = make_rng(43);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DensityState state(BSplineOrder::kQuadratic, 4, 2);
  // Structural bound: per column at most one scale write plus the supports of
  // the outgoing and incoming points, each <= (m+1)^n entries.
  const std::uint64_t gamma = state.receptive_fields().size();
  const std::uint64_t support_cap = 16;  // (3+1)^2
  const std::uint64_t bound = gamma * (2 * support_cap + 1);
  std::vector<std::vector<double>> replay;
  for (int i = 0; i < 100; ++i) replay.push_back({unit(rng), unit(rng)});

  std::vector<std::uint64_t> early;
  for (const auto& x : replay) {
    state.update(x);
    CHECK(state.last_update_touched() <= bound);
    early.push_back(state.last_update_touched());
  }
  for (int i = 0; i < 5000; ++i) state.update({unit(rng), unit(rng)});
  // Replaying the identical point sequence must cost exactly the same from
  // the second element on (the first differs only in the outgoing support).
  for (std::size_t i = 0; i < replay.size(); ++i) {
    state.update(replay[i]);
    CHECK(state.last_update_touched() <= bound);
    if (i > 0) CHECK(state.last_update_touched() == early[i]);
  }
}

TEST_CASE("uniform-sample density integrates to about one") {
  auto rng = make_rng(47);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DensityState state(BSplineOrder::kLinear, 3, 1, ReceptiveFieldSet({1.0}), /*harmonic=*/true);
  for (int i = 0; i < 10000; ++i) state.update({unit(rng)});
  const int grid_pts = 1000;
  double integral = 0.0;
  for (int i = 0; i <= grid_pts; ++i) {
    const double x = static_cast<double>(i) / grid_pts;
    const double v = state.density({x})[0];
    integral += (i == 0 || i == grid_pts) ? 0.5 * v : v;
  }
  integral /= grid_pts;
  CHECK(integral == doctest::Approx(1.0).epsilon(0.1));
}
