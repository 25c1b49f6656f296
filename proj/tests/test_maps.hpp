// Small analytic map builders shared by the test suites.
#pragma once

#include <cmath>

#include "lagflow/grid.hpp"

namespace testmaps {

inline lagflow::MapGrid identity(int n) { return lagflow::MapGrid(n); }

inline lagflow::MapGrid translation(int n, double bx, double by) {
  lagflow::MapGrid map(n);
  for (auto& x : map.u) x = bx;
  for (auto& x : map.v) x = by;
  return map;
}

/// u = a sin(2 pi k y), v = 0: area preserving with identically-1 discrete
/// Jacobian (u has no x dependence).
inline lagflow::MapGrid shear(int n, double a, int k = 1) {
  lagflow::MapGrid map(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      map.u[map.idx(i, j)] = a * std::sin(2.0 * M_PI * k * map.y(j));
  return map;
}

/// Linear map with an integer matrix M (unit determinant for the
/// area-preserving cases).  The displacement grows across the seam by whole
/// periods, which the period-reduced differences absorb exactly.
inline lagflow::MapGrid integer_affine(int n, int m11, int m12, int m21, int m22) {
  lagflow::MapGrid map(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      map.u[map.idx(i, j)] = (m11 - 1) * map.x(i) + m12 * map.y(j);
      map.v[map.idx(i, j)] = m21 * map.x(i) + (m22 - 1) * map.y(j);
    }
  }
  return map;
}

/// Not area preserving: u = a sin(2 pi x), Jacobian 1 + 2 pi a cos(2 pi x).
inline lagflow::MapGrid x_wave(int n, double a) {
  lagflow::MapGrid map(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      map.u[map.idx(i, j)] = a * std::sin(2.0 * M_PI * map.x(i));
  return map;
}

}  // namespace testmaps
