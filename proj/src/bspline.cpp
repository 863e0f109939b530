#include "wprcn/bspline.hpp"

#include <cmath>

namespace wprcn {

double bspline_phi(double x, BSplineOrder m) {
  switch (m) {
    case BSplineOrder::kLinear:
      if (x >= 0.0 && x < 1.0) return x;
      if (x >= 1.0 && x < 2.0) return 2.0 - x;
      return 0.0;
    case BSplineOrder::kQuadratic:
      if (x >= 0.0 && x < 1.0) return 0.5 * x * x;
      if (x >= 1.0 && x < 2.0) return 0.75 - (x - 1.5) * (x - 1.5);
      if (x >= 2.0 && x < 3.0) return 0.5 * (x - 3.0) * (x - 3.0);
      return 0.0;
    case BSplineOrder::kCubic:
      if (x >= 0.0 && x < 1.0) return x * x * x / 6.0;
      if (x >= 1.0 && x < 2.0) return (-3.0 * x * x * x + 12.0 * x * x - 12.0 * x + 4.0) / 6.0;
      if (x >= 2.0 && x < 3.0) return (3.0 * x * x * x - 24.0 * x * x + 60.0 * x - 44.0) / 6.0;
      if (x >= 3.0 && x < 4.0) {
        const double d = 4.0 - x;
        return d * d * d / 6.0;
      }
      return 0.0;
  }
  return 0.0;
}

double radial_phi(const std::vector<double>& x, int j0, const std::vector<double>& k,
                  BSplineOrder m) {
  if (x.size() != k.size()) throw std::invalid_argument("radial_phi: dimension mismatch");
  const double dil = std::ldexp(1.0, j0);  // 2^j0
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = dil * x[i] - k[i];
    sq += d * d;
  }
  const double half_m = 0.5 * static_cast<double>(order_m(m));
  if (sq >= half_m * half_m) return 0.0;
  const double scale = std::pow(2.0, 0.5 * static_cast<double>(x.size()) * j0);
  return scale * bspline_phi(std::sqrt(sq) + half_m, m);
}

}  // namespace wprcn
