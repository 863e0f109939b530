#pragma once

#include <cstdint>
#include <vector>

#include "wprcn/bspline.hpp"

namespace wprcn {

// Integer lattice of scaling-function centers for resolution j0 and input
// dimension n. Per dimension the values span {-u, ..., 2^j0 + u}; points are
// all cross-dimension combinations in lexicographic order (first dimension
// most significant).
struct TranslationGrid {
  int j0 = 0;
  std::size_t n = 0;
  int lo = 0;              // -u
  int hi = 0;              // 2^j0 + u
  std::size_t per_dim = 0;  // hi - lo + 1
  std::size_t count = 0;    // per_dim^n

  TranslationGrid() = default;
  TranslationGrid(int j0, std::size_t n, BSplineOrder m);

  // Point index -> integer coordinates.
  std::vector<int> point(std::size_t index) const;
  std::size_t index_of(const std::vector<int>& k) const;
};

// The ordered receptive-field (forgetting-factor) set; one density column
// per alpha. Larger alpha follows faster non-stationarity.
struct ReceptiveFieldSet {
  std::vector<double> alphas;

  ReceptiveFieldSet() : alphas{1.0, 1.0 / 10, 1.0 / 100, 1.0 / 500, 1.0 / 1000} {}
  explicit ReceptiveFieldSet(std::vector<double> a);
  std::size_t size() const { return alphas.size(); }
};

// Sparse evaluation of the radial scaling function over the grid: only the
// points within radius m/2 of 2^j0 * x are non-zero, at most (m+1)^n of them.
struct SparsePhi {
  std::vector<std::size_t> index;
  std::vector<double> value;
};

// Streaming wavelet density estimator for one (m, j0) configuration.
//
// The weight matrix follows  w = (1 - alpha) w + alpha * phi(x)  per column;
// storage is a dense l x gamma matrix kept as stored * col_scale so that the
// decay multiplies one scalar per column and a data point touches only its
// sparse support. Harmonic mode (alpha_t = 1/t) turns the recursion into an
// exact running mean of phi over the stream, which is what the batch
// estimator computes; production mode uses the fixed alpha set.
//
// Density values are exposed raw, not renormalized to integrate to 1; the
// downstream classifier consumes relative magnitudes.
class DensityState {
 public:
  DensityState(BSplineOrder order, int j0, std::size_t n,
               ReceptiveFieldSet rfs = ReceptiveFieldSet(), bool harmonic = false);

  BSplineOrder order() const { return order_; }
  int j0() const { return grid_.j0; }
  std::size_t input_dim() const { return grid_.n; }
  const TranslationGrid& grid() const { return grid_; }
  const ReceptiveFieldSet& receptive_fields() const { return rfs_; }
  bool harmonic() const { return harmonic_; }
  std::uint64_t update_count() const { return update_count_; }

  SparsePhi phi_sparse(const std::vector<double>& x) const;
  std::vector<double> phi_vector(const std::vector<double>& x) const;  // dense, for tests

  // One streaming step; components of x outside [0,1] are clamped.
  void update(const std::vector<double>& x);

  // Per-column density  p_hat_g(x) = w[:,g] . phi(x);  gamma entries, all >= 0.
  std::vector<double> density(const std::vector<double>& x) const;

  double weight(std::size_t point_index, std::size_t column) const;
  std::vector<double> weights_dense() const;  // l x gamma, row-major
  void load_weights(const std::vector<double>& dense, std::uint64_t update_count);

  // Weight-entry reads/writes performed by the most recent update; the
  // constant-time invariant is asserted on this, not on wall clock.
  std::uint64_t last_update_touched() const { return last_update_touched_; }

 private:
  BSplineOrder order_;
  TranslationGrid grid_;
  ReceptiveFieldSet rfs_;
  bool harmonic_;
  std::uint64_t update_count_ = 0;
  std::vector<double> stored_;     // l x gamma, actual weight = stored * col_scale
  std::vector<double> col_scale_;  // gamma
  // Support of the previous point, per column that did a full replacement.
  std::vector<std::vector<std::size_t>> replace_support_;
  std::uint64_t last_update_touched_ = 0;

  void renormalize_column(std::size_t g);
};

// Batch oracle: single-column state whose weights are the arithmetic mean of
// phi over the samples. Streaming updates under the harmonic schedule must
// match it to near machine precision.
DensityState batch_estimate(const std::vector<std::vector<double>>& samples, BSplineOrder order,
                            int j0);

}  // namespace wprcn
