#pragma once

#include <array>
#include <vector>

#include "lagflow/grid.hpp"
#include "lagflow/stencils.hpp"

namespace lagflow {

// Geometry of the graph surface F(x, y) = (x, y, x + u, y + v) inside the
// flat product R^2 x R^2 (universal cover of T^2 x T^2), evaluated from the
// 2-jet of the displacement.  The normal bundle of a Lagrangian graph is
// identified with the tangent bundle through the complex structure of
// omega_1 - omega_2, which in these coordinates is
//   J'(a, b, c, d) = (-b, a, d, -c),
// and B, sigma are the tangential avatars of the second fundamental form A
// and the mean curvature H under that identification.

inline std::array<double, 4> jprime(const std::array<double, 4>& x) {
  return {-x[1], x[0], x[3], -x[2]};
}

inline double dot4(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

/// Everything the flow and the monitors need at one node.
struct TorusNodeGeometry {
  double g11, g12, g22;        // induced metric
  double det;                  // det g
  double gi11, gi12, gi22;     // inverse metric
  double dens;                 // sqrt(det g)
  double jac;                  // Jacobian of the map
  double defect;               // jac - 1
  double eta;                  // 2 / sqrt(det g)
  double eta_hodge;            // (1 + jac) / sqrt(det g); equal when jac = 1
  std::array<double, 4> A[3];  // second fundamental form: xx, xy, yy
  std::array<double, 4> H;     // mean curvature vector
  double a2;                   // |A|^2
  double h2;                   // |H|^2
  double B[2][2][2];           // B[k][i][j] = -<A(e_i, e_j), J' e_k>
  double sigma[2];             // sigma_k = <J' e_k, H>
  double wu, wv;               // graphical flow velocity g^{ij} d_ij (u, v)
  double gi_eig_max;           // larger eigenvalue of g^{ij} (CFL input)
  bool metric_ok;              // false when g is not positive definite
};

/// Pure pointwise kernel; metric_ok=false signals a degenerate node and the
/// remaining fields are unspecified.
TorusNodeGeometry torus_node_geometry(const TorusJet& jet);

/// Stripped kernel for the time loop: velocity, |H|^2, CFL eigenvalue and the
/// run guards, without the frame/B/sigma work that only monitor rows need.
/// WITH_A2 additionally builds the second fundamental form for the blow-up
/// guard.  Values agree exactly with torus_node_geometry where they overlap
/// (same expressions, same evaluation order).
struct TorusNodeFlow {
  double dens, jac, defect;
  double wu, wv;
  double h2;
  double a2;  // only when WITH_A2
  double gi_eig_max;
  bool metric_ok;
};

template <bool WITH_A2>
inline TorusNodeFlow torus_node_flow(const TorusJet& jet) {
  TorusNodeFlow g;
  const double fx1 = 1.0 + jet.ux, fx2 = jet.vx;
  const double fy1 = jet.uy, fy2 = 1.0 + jet.vy;
  const double g11 = 1.0 + fx1 * fx1 + fx2 * fx2;
  const double g12 = fx1 * fy1 + fx2 * fy2;
  const double g22 = 1.0 + fy1 * fy1 + fy2 * fy2;
  const double det = g11 * g22 - g12 * g12;
  g.metric_ok = std::isfinite(det) && det > 0.0 && g11 > 0.0;
  if (!g.metric_ok) return g;
  g.dens = std::sqrt(det);
  g.jac = fx1 * fy2 - fy1 * fx2;
  g.defect = g.jac - 1.0;
  const double gi11 = g22 / det, gi12 = -g12 / det, gi22 = g11 / det;
  g.wu = gi11 * jet.uxx + 2.0 * gi12 * jet.uxy + gi22 * jet.uyy;
  g.wv = gi11 * jet.vxx + 2.0 * gi12 * jet.vxy + gi22 * jet.vyy;
  // H from the graphical velocity minus its tangential part
  const double p1 = g.wu * fx1 + g.wv * fx2;
  const double p2 = g.wu * fy1 + g.wv * fy2;
  const double v1 = gi11 * p1 + gi12 * p2;
  const double v2 = gi12 * p1 + gi22 * p2;
  const double h3 = g.wu - v1 * fx1 - v2 * fy1;
  const double h4 = g.wv - v1 * fx2 - v2 * fy2;
  g.h2 = v1 * v1 + v2 * v2 + h3 * h3 + h4 * h4;
  g.a2 = 0.0;
  if constexpr (WITH_A2) {
    const double uij[3] = {jet.uxx, jet.uxy, jet.uyy};
    const double vij[3] = {jet.vxx, jet.vxy, jet.vyy};
    double A[3][4];
    for (int k = 0; k < 3; ++k) {
      const double c1 = uij[k] * fx1 + vij[k] * fx2;
      const double c2 = uij[k] * fy1 + vij[k] * fy2;
      const double gm1 = gi11 * c1 + gi12 * c2;
      const double gm2 = gi12 * c1 + gi22 * c2;
      A[k][0] = -gm1;
      A[k][1] = -gm2;
      A[k][2] = uij[k] - gm1 * fx1 - gm2 * fy1;
      A[k][3] = vij[k] - gm1 * fx2 - gm2 * fy2;
    }
    for (int m = 0; m < 4; ++m) {
      const double s11 = A[0][m], s12 = A[1][m], s22 = A[2][m];
      const double t11 =
          gi11 * (gi11 * s11 + gi12 * s12) + gi12 * (gi11 * s12 + gi12 * s22);
      const double t12 =
          gi11 * (gi12 * s11 + gi22 * s12) + gi12 * (gi12 * s12 + gi22 * s22);
      const double t22 =
          gi12 * (gi12 * s11 + gi22 * s12) + gi22 * (gi12 * s12 + gi22 * s22);
      g.a2 += t11 * s11 + 2.0 * t12 * s12 + t22 * s22;
    }
  }
  const double tr = gi11 + gi22;
  const double disc = tr * tr - 4.0 / det;
  g.gi_eig_max = 0.5 * (tr + std::sqrt(std::max(disc, 0.0)));
  return g;
}

/// Per-node fields over the whole grid (the stored form used by tests and
/// diagnostics; sweeps in the flow engine reduce without materializing this).
struct GeometryField {
  int n = 0;
  int order = 2;
  double h = 0;
  std::vector<double> g11, g12, g22, gi11, gi12, gi22;
  std::vector<double> dens, jac, defect;
  std::vector<double> A;  // 12 per node: [xx yy xy] x 4 components? see layout
  std::vector<double> H;  // 4 per node
  std::vector<double> a2, h2, eta, eta_hodge;
  std::vector<double> B;      // 8 per node, k major then i, j
  std::vector<double> sigma;  // 2 per node

  size_t idx(int i, int j) const { return static_cast<size_t>(i) * n + j; }

  /// Largest |eta - eta_hodge| over the grid; the two formulas agree exactly
  /// on area-preserving maps, so this gap is a Lagrangian-defect monitor.
  double eta_cross_gap() const;
};

// A layout: node-major blocks of 12 doubles ordered (A_xx, A_xy, A_yy), each a
// 4-vector.

GeometryField compute_geometry(const MapGrid& map, int order);

/// eta per node (moved out of the field).
std::vector<double> eta_field(const GeometryField& geom);

struct DefectNorms {
  double sup;
  double l2;  // area-weighted root mean square of (jac - 1)
};
DefectNorms lagrangian_defect(const GeometryField& geom);

struct BTensor {
  double v[2][2][2];  // v[k][i][j]
};

/// Extracts per-node B and sigma from a computed field (they are also stored
/// on GeometryField; this is the tensor view at one node).
BTensor b_tensor_at(const GeometryField& geom, int i, int j);

struct BIdentity {
  double b2;         // |B|^2 over all 8 slots
  double sigma2;     // |sigma|^2 with sigma_k = -(B_k11 + B_k22)
  double lhs;        // 2|B|^2 - |sigma|^2
  double rhs;        // sum_k (B_k11 - B_k22)^2 + 4 B_k12^2
  double ratio;      // |sigma|^2 / |B|^2
  double asymmetry;  // max pairwise deviation from full symmetry
  bool symmetric;    // asymmetry <= tolerance
};

/// Both routes of the curvature identity plus the ratio for the 4/3 bound.
/// The identity is only meaningful for fully symmetric B; asymmetry beyond
/// tol just flags the result rather than failing.
BIdentity b_identities(const BTensor& b, double tol = 1e-10);

/// Scalar reductions over a single sweep (no stored fields).  All sums are
/// accumulated per row and then combined in row order, so results are
/// independent of thread count.
struct GeometryReduction {
  double area = 0;            // integral of sqrt(det g)
  double int_h2 = 0;          // integral of |H|^2 dmu
  double int_a2 = 0;          // integral of |A|^2 dmu
  double sup_h2 = 0;
  double sup_a2 = 0;
  double min_eta = 0;
  double max_eta = 0;
  double defect_sup = 0;
  double defect_l2 = 0;
  double min_jac = 0;
  double gi_eig_max = 0;
  double sigma_ratio_max = 0;  // over nodes with |B|^2 > 1e-14; 0 if none
  double eta_gap_max = 0;      // max |eta - eta_hodge|
  bool finite = true;
  int bad_i = -1, bad_j = -1;  // first non-PD node when metric_ok failed
  bool metric_ok = true;
};

GeometryReduction reduce_geometry(const MapGrid& map, int order);

/// Row-slotted accumulator behind reduce_geometry, reusable by fused sweeps
/// (the flow engine folds its per-step reductions through this).  visit() for
/// different rows may run concurrently; finish() combines rows in order.
class GeometryAccumulator {
public:
  GeometryAccumulator(int n, double cell);
  void visit(int i, int j, const TorusNodeGeometry& g);
  GeometryReduction finish() const;

private:
  struct RowAcc {
    double area = 0, int_h2 = 0, int_a2 = 0, defect_w2 = 0;
    double sup_h2 = 0, sup_a2 = 0, defect_sup = 0;
    double min_eta = 0, max_eta = 0, min_jac = 0;
    double gi_eig_max = 0, sigma_ratio_max = 0, eta_gap_max = 0;
    bool finite = true;
    bool touched = false;
    int bad_j = -1;
  };
  std::vector<RowAcc> rows_;
  double cell_;
};

/// Kernel evaluation at a single node (diagnostics, refinement studies).
TorusNodeGeometry geometry_at(const MapGrid& map, int order, int i, int j);

}  // namespace lagflow
