#pragma once

#include "lagflow/grid.hpp"

namespace lagflow {

/// First and second partials of one scalar field at a node.
struct FieldJet {
  double fx, fy, fxx, fxy, fyy;
};

/// Full 2-jet of the displacement pair (u, v) at a node.
struct TorusJet {
  double ux, uy, vx, vy;
  double uxx, uxy, uyy, vxx, vxy, vyy;
};

inline int wrap_index(int k, int n) { return k < 0 ? k + n : (k >= n ? k - n : k); }

// Centred periodic stencils, written entirely in neighbour-minus-centre
// differences so each difference can be reduced modulo the unit period
// (see wrap_unit).  Every derivative stencil has zero coefficient sum, so
// the rewrite is exact.

template <int ORDER>
inline FieldJet field_jet(const double* rm2, const double* rm1, const double* r0,
                          const double* rp1, const double* rp2, int jm2, int jm1,
                          int j, int jp1, int jp2, double h);

template <>
inline FieldJet field_jet<2>(const double*, const double* rm1, const double* r0,
                             const double* rp1, const double*, int, int jm1,
                             int j, int jp1, int, double h) {
  const double c = r0[j];
  const double xp = wrap_unit(rp1[j] - c);
  const double xm = wrap_unit(rm1[j] - c);
  const double yp = wrap_unit(r0[jp1] - c);
  const double ym = wrap_unit(r0[jm1] - c);
  const double pp = wrap_unit(rp1[jp1] - c);
  const double pm = wrap_unit(rp1[jm1] - c);
  const double mp = wrap_unit(rm1[jp1] - c);
  const double mm = wrap_unit(rm1[jm1] - c);
  FieldJet out;
  out.fx = (xp - xm) / (2.0 * h);
  out.fy = (yp - ym) / (2.0 * h);
  out.fxx = (xp + xm) / (h * h);
  out.fyy = (yp + ym) / (h * h);
  out.fxy = (pp - pm - mp + mm) / (4.0 * h * h);
  return out;
}

template <>
inline FieldJet field_jet<4>(const double* rm2, const double* rm1, const double* r0,
                             const double* rp1, const double* rp2, int jm2, int jm1,
                             int j, int jp1, int jp2, double h) {
  const double c = r0[j];
  const double x1p = wrap_unit(rp1[j] - c), x1m = wrap_unit(rm1[j] - c);
  const double x2p = wrap_unit(rp2[j] - c), x2m = wrap_unit(rm2[j] - c);
  const double y1p = wrap_unit(r0[jp1] - c), y1m = wrap_unit(r0[jm1] - c);
  const double y2p = wrap_unit(r0[jp2] - c), y2m = wrap_unit(r0[jm2] - c);
  FieldJet out;
  out.fx = (8.0 * (x1p - x1m) - (x2p - x2m)) / (12.0 * h);
  out.fy = (8.0 * (y1p - y1m) - (y2p - y2m)) / (12.0 * h);
  out.fxx = (16.0 * (x1p + x1m) - (x2p + x2m)) / (12.0 * h * h);
  out.fyy = (16.0 * (y1p + y1m) - (y2p + y2m)) / (12.0 * h * h);
  // tensor product of the order-4 first-derivative stencils
  const double w11 = wrap_unit(rp1[jp1] - c) - wrap_unit(rp1[jm1] - c) -
                     wrap_unit(rm1[jp1] - c) + wrap_unit(rm1[jm1] - c);
  const double w12 = wrap_unit(rp1[jp2] - c) - wrap_unit(rp1[jm2] - c) -
                     wrap_unit(rm1[jp2] - c) + wrap_unit(rm1[jm2] - c);
  const double w21 = wrap_unit(rp2[jp1] - c) - wrap_unit(rp2[jm1] - c) -
                     wrap_unit(rm2[jp1] - c) + wrap_unit(rm2[jm1] - c);
  const double w22 = wrap_unit(rp2[jp2] - c) - wrap_unit(rp2[jm2] - c) -
                     wrap_unit(rm2[jp2] - c) + wrap_unit(rm2[jm2] - c);
  out.fxy = (64.0 * w11 - 8.0 * w12 - 8.0 * w21 + w22) / (144.0 * h * h);
  return out;
}

template <int ORDER>
inline TorusJet torus_jet_rows(const double* um2, const double* um1, const double* u0,
                               const double* up1, const double* up2,
                               const double* vm2, const double* vm1, const double* v0,
                               const double* vp1, const double* vp2, int jm2, int jm1,
                               int j, int jp1, int jp2, double h) {
  const FieldJet ju = field_jet<ORDER>(um2, um1, u0, up1, up2, jm2, jm1, j, jp1, jp2, h);
  const FieldJet jv = field_jet<ORDER>(vm2, vm1, v0, vp1, vp2, jm2, jm1, j, jp1, jp2, h);
  return TorusJet{ju.fx, ju.fy, jv.fx, jv.fy, ju.fxx, ju.fxy,
                  ju.fyy, jv.fxx, jv.fxy, jv.fyy};
}

/// Pointwise gather at node (i, j); convenience path for diagnostics and
/// oracle comparisons, not the sweep hot loop.
TorusJet torus_jet_at(const MapGrid& map, int order, int i, int j);

}  // namespace lagflow
