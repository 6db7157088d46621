#pragma once

#include <cmath>
#include <vector>

#include "rflow/curve.hpp"

namespace testutil {

inline std::vector<rflow::Point2> circle_points(double R, std::size_t n, rflow::Point2 c = {},
                                                bool clockwise = false) {
  std::vector<rflow::Point2> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    double t = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
    if (clockwise) t = -t;
    v[k] = {c.x + R * std::cos(t), c.y + R * std::sin(t)};
  }
  return v;
}

inline rflow::PlanarCurve circle(double R, std::size_t n, rflow::Point2 c = {}) {
  return rflow::PlanarCurve(circle_points(R, n, c));
}

// Axis-aligned rectangle [-a, a] x [-b, b] with m points per side.
inline std::vector<rflow::Point2> rectangle_points(double a, double b, std::size_t m) {
  std::vector<rflow::Point2> v;
  rflow::Point2 corners[4] = {{-a, -b}, {a, -b}, {a, b}, {-a, b}};
  for (int s = 0; s < 4; ++s) {
    rflow::Point2 p = corners[s], q = corners[(s + 1) % 4];
    for (std::size_t k = 0; k < m; ++k) v.push_back(p + (double(k) / double(m)) * (q - p));
  }
  return v;
}

}  // namespace testutil
