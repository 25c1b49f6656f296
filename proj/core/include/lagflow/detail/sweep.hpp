#pragma once

#include "lagflow/geometry.hpp"
#include "lagflow/parallel.hpp"

namespace lagflow::detail {

struct RowPointers {
  const double *um2, *um1, *u0, *up1, *up2;
  const double *vm2, *vm1, *v0, *vp1, *vp2;
};

inline RowPointers row_pointers(const MapGrid& map, int i) {
  const int n = map.n;
  const size_t s = static_cast<size_t>(n);
  const double* u = map.u.data();
  const double* v = map.v.data();
  const int im1 = wrap_index(i - 1, n), ip1 = wrap_index(i + 1, n);
  const int im2 = wrap_index(i - 2, n), ip2 = wrap_index(i + 2, n);
  return {u + im2 * s, u + im1 * s, u + i * s, u + ip1 * s, u + ip2 * s,
          v + im2 * s, v + im1 * s, v + i * s, v + ip1 * s, v + ip2 * s};
}

template <int ORDER, class Fn>
void jet_sweep_rows(const MapGrid& map, Fn&& per_node) {
  const int n = map.n;
  const double h = map.h();
  parallel_rows(n, [&](int i) {
    const RowPointers rp = row_pointers(map, i);
    for (int j = 0; j < n; ++j) {
      const int jm1 = wrap_index(j - 1, n), jp1 = wrap_index(j + 1, n);
      const int jm2 = wrap_index(j - 2, n), jp2 = wrap_index(j + 2, n);
      per_node(i, j,
               torus_jet_rows<ORDER>(rp.um2, rp.um1, rp.u0, rp.up1, rp.up2,
                                     rp.vm2, rp.vm1, rp.v0, rp.vp1, rp.vp2,
                                     jm2, jm1, j, jp1, jp2, h));
    }
  });
}

/// per_node(i, j, jet) for every grid node, rows in parallel; per_node must
/// only write to row-i-owned slots.
template <class Fn>
void jet_sweep(const MapGrid& map, int order, Fn&& per_node) {
  if (order == 2)
    jet_sweep_rows<2>(map, per_node);
  else
    jet_sweep_rows<4>(map, per_node);
}

/// Same, with the full node kernel applied to each jet.
template <class Fn>
void geometry_sweep(const MapGrid& map, int order, Fn&& per_node) {
  jet_sweep(map, order, [&](int i, int j, const TorusJet& jet) {
    per_node(i, j, torus_node_geometry(jet));
  });
}

}  // namespace lagflow::detail
