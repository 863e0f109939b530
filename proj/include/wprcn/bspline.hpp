#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace wprcn {

// B-spline order: linear (2), quadratic (3) or cubic (4). The grid margin u
// is 1 for linear/quadratic and 2 for cubic.
enum class BSplineOrder : int { kLinear = 2, kQuadratic = 3, kCubic = 4 };

inline BSplineOrder bspline_order_from_int(int m) {
  if (m < 2 || m > 4) throw std::invalid_argument("b-spline order must be 2, 3 or 4");
  return static_cast<BSplineOrder>(m);
}

inline int order_m(BSplineOrder m) { return static_cast<int>(m); }
inline int order_margin(BSplineOrder m) { return m == BSplineOrder::kCubic ? 2 : 1; }

// Closed-form cardinal B-spline of order m, supported on [0, m].
double bspline_phi(double x, BSplineOrder m);

// Radial scaling function: 2^(n*j0/2) * phi(||2^j0 x - k|| + m/2, m).
// Zero whenever ||2^j0 x - k|| >= m/2.
double radial_phi(const std::vector<double>& x, int j0, const std::vector<double>& k,
                  BSplineOrder m);

}  // namespace wprcn
