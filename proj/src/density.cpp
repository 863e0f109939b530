#include "wprcn/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wprcn {

namespace {
constexpr double kRenormFloor = 1e-140;
}

TranslationGrid::TranslationGrid(int j0, std::size_t n, BSplineOrder m) : j0(j0), n(n) {
  if (j0 < 0) throw std::invalid_argument("grid: resolution j0 must be >= 0");
  if (n == 0) throw std::invalid_argument("grid: dimension must be >= 1");
  const int u = order_margin(m);
  lo = -u;
  hi = (1 << j0) + u;
  per_dim = static_cast<std::size_t>(hi - lo + 1);
  count = 1;
  for (std::size_t d = 0; d < n; ++d) count *= per_dim;
}

std::vector<int> TranslationGrid::point(std::size_t index) const {
  std::vector<int> k(n);
  for (std::size_t d = n; d-- > 0;) {
    k[d] = lo + static_cast<int>(index % per_dim);
    index /= per_dim;
  }
  return k;
}

std::size_t TranslationGrid::index_of(const std::vector<int>& k) const {
  std::size_t idx = 0;
  for (std::size_t d = 0; d < n; ++d) {
    if (k[d] < lo || k[d] > hi) throw std::invalid_argument("grid: point out of range");
    idx = idx * per_dim + static_cast<std::size_t>(k[d] - lo);
  }
  return idx;
}

ReceptiveFieldSet::ReceptiveFieldSet(std::vector<double> a) : alphas(std::move(a)) {
  if (alphas.empty()) throw std::invalid_argument("receptive fields: empty alpha set");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0 && alphas[i] <= 1.0))
      throw std::invalid_argument("receptive fields: alpha must be in (0, 1]");
    if (i > 0 && !(alphas[i] < alphas[i - 1]))
      throw std::invalid_argument("receptive fields: alphas must be strictly decreasing");
  }
}

DensityState::DensityState(BSplineOrder order, int j0, std::size_t n, ReceptiveFieldSet rfs,
                           bool harmonic)
    : order_(order),
      grid_(j0, n, order),
      rfs_(std::move(rfs)),
      harmonic_(harmonic),
      stored_(grid_.count * rfs_.size(), 0.0),
      col_scale_(rfs_.size(), 1.0),
      replace_support_(rfs_.size()) {}

SparsePhi DensityState::phi_sparse(const std::vector<double>& x) const {
  if (x.size() != grid_.n) throw std::invalid_argument("density: input dimension mismatch");
  const double dil = std::ldexp(1.0, grid_.j0);
  const int m = order_m(order_);
  const double half_m = 0.5 * m;
  const double scale = std::pow(2.0, 0.5 * static_cast<double>(grid_.n) * grid_.j0);

  // Per-dimension integer ranges with |2^j0 x_d - k_d| < m/2, clamped to the grid.
  std::vector<int> k_lo(grid_.n), k_hi(grid_.n);
  std::vector<double> center(grid_.n);
  for (std::size_t d = 0; d < grid_.n; ++d) {
    const double c = dil * std::clamp(x[d], 0.0, 1.0);
    center[d] = c;
    k_lo[d] = std::max(grid_.lo, static_cast<int>(std::ceil(c - half_m)));
    k_hi[d] = std::min(grid_.hi, static_cast<int>(std::floor(c + half_m)));
  }

  SparsePhi out;
  std::vector<int> k(k_lo);
  for (std::size_t d = 0; d < grid_.n; ++d)
    if (k_lo[d] > k_hi[d]) return out;
  while (true) {
    double sq = 0.0;
    for (std::size_t d = 0; d < grid_.n; ++d) {
      const double diff = center[d] - k[d];
      sq += diff * diff;
    }
    if (sq < half_m * half_m) {
      const double v = scale * bspline_phi(std::sqrt(sq) + half_m, order_);
      if (v != 0.0) {
        out.index.push_back(grid_.index_of(k));
        out.value.push_back(v);
      }
    }
    std::size_t d = grid_.n;
    while (d-- > 0) {
      if (++k[d] <= k_hi[d]) break;
      k[d] = k_lo[d];
      if (d == 0) return out;
    }
  }
}

std::vector<double> DensityState::phi_vector(const std::vector<double>& x) const {
  std::vector<double> dense(grid_.count, 0.0);
  SparsePhi sp = phi_sparse(x);
  for (std::size_t i = 0; i < sp.index.size(); ++i) dense[sp.index[i]] = sp.value[i];
  return dense;
}

void DensityState::renormalize_column(std::size_t g) {
  const std::size_t gamma = rfs_.size();
  const double s = col_scale_[g];
  for (std::size_t l = 0; l < grid_.count; ++l) stored_[l * gamma + g] *= s;
  col_scale_[g] = 1.0;
  last_update_touched_ += grid_.count;
}

void DensityState::update(const std::vector<double>& x) {
  const SparsePhi sp = phi_sparse(x);
  const std::size_t gamma = rfs_.size();
  last_update_touched_ = 0;
  ++update_count_;
  if (harmonic_) {
    // alpha_t = 1/t makes the column an exact running mean: keep the raw
    // phi sum in stored_ and fold 1/t into the column scale.
    const double inv_t = 1.0 / static_cast<double>(update_count_);
    for (std::size_t g = 0; g < gamma; ++g) {
      col_scale_[g] = inv_t;
      for (std::size_t i = 0; i < sp.index.size(); ++i)
        stored_[sp.index[i] * gamma + g] += sp.value[i];
      last_update_touched_ += sp.index.size() + 1;
    }
    return;
  }
  for (std::size_t g = 0; g < gamma; ++g) {
    const double alpha = rfs_.alphas[g];
    if (alpha == 1.0) {
      // Full replacement: the column is exactly phi of the current point.
      for (std::size_t idx : replace_support_[g]) stored_[idx * gamma + g] = 0.0;
      last_update_touched_ += replace_support_[g].size();
      replace_support_[g].clear();
      col_scale_[g] = 1.0;
      for (std::size_t i = 0; i < sp.index.size(); ++i) {
        stored_[sp.index[i] * gamma + g] = sp.value[i];
        replace_support_[g].push_back(sp.index[i]);
      }
      last_update_touched_ += sp.index.size();
    } else {
      col_scale_[g] *= (1.0 - alpha);
      if (col_scale_[g] < kRenormFloor) renormalize_column(g);
      const double w = alpha / col_scale_[g];
      for (std::size_t i = 0; i < sp.index.size(); ++i)
        stored_[sp.index[i] * gamma + g] += w * sp.value[i];
      last_update_touched_ += sp.index.size() + 1;
    }
  }
}

std::vector<double> DensityState::density(const std::vector<double>& x) const {
  const SparsePhi sp = phi_sparse(x);
  const std::size_t gamma = rfs_.size();
  std::vector<double> p(gamma, 0.0);
  for (std::size_t g = 0; g < gamma; ++g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < sp.index.size(); ++i)
      acc += stored_[sp.index[i] * gamma + g] * sp.value[i];
    p[g] = acc * col_scale_[g];
  }
  return p;
}

double DensityState::weight(std::size_t point_index, std::size_t column) const {
  return stored_[point_index * rfs_.size() + column] * col_scale_[column];
}

std::vector<double> DensityState::weights_dense() const {
  const std::size_t gamma = rfs_.size();
  std::vector<double> w(stored_.size());
  for (std::size_t l = 0; l < grid_.count; ++l)
    for (std::size_t g = 0; g < gamma; ++g) w[l * gamma + g] = stored_[l * gamma + g] * col_scale_[g];
  return w;
}

void DensityState::load_weights(const std::vector<double>& dense, std::uint64_t update_count) {
  if (dense.size() != stored_.size())
    throw std::invalid_argument("density: weight matrix extent mismatch");
  stored_ = dense;
  std::fill(col_scale_.begin(), col_scale_.end(), 1.0);
  update_count_ = update_count;
  // Full-replacement columns must know their live support to clear it on the
  // next update.
  const std::size_t gamma = rfs_.size();
  for (std::size_t g = 0; g < gamma; ++g) {
    replace_support_[g].clear();
    if (!harmonic_ && rfs_.alphas[g] == 1.0)
      for (std::size_t l = 0; l < grid_.count; ++l)
        if (stored_[l * gamma + g] != 0.0) replace_support_[g].push_back(l);
  }
  // Harmonic streams keep the raw phi sum in stored_; rebuild that form so
  // further updates continue the running mean.
  if (harmonic_ && update_count_ > 0) {
    const double count = static_cast<double>(update_count_);
    for (auto& v : stored_) v *= count;
    std::fill(col_scale_.begin(), col_scale_.end(), 1.0 / count);
  }
}

DensityState batch_estimate(const std::vector<std::vector<double>>& samples, BSplineOrder order,
                            int j0) {
  if (samples.empty()) throw std::invalid_argument("batch_estimate: no samples");
  DensityState state(order, j0, samples[0].size(), ReceptiveFieldSet({1.0}));
  const std::size_t l = state.grid().count;
  std::vector<double> acc(l, 0.0);
  for (const auto& x : samples) {
    SparsePhi sp = state.phi_sparse(x);
    for (std::size_t i = 0; i < sp.index.size(); ++i) acc[sp.index[i]] += sp.value[i];
  }
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (auto& v : acc) v *= inv;
  state.load_weights(acc, samples.size());
  return state;
}

}  // namespace wprcn
