#include "lagflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lagflow/detail/sweep.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/parallel.hpp"

namespace lagflow {

TorusJet torus_jet_at(const MapGrid& map, int order, int i, int j) {
  const int n = map.n;
  const double* u = map.u.data();
  const double* v = map.v.data();
  const int im1 = wrap_index(i - 1, n), ip1 = wrap_index(i + 1, n);
  const int im2 = wrap_index(i - 2, n), ip2 = wrap_index(i + 2, n);
  const int jm1 = wrap_index(j - 1, n), jp1 = wrap_index(j + 1, n);
  const int jm2 = wrap_index(j - 2, n), jp2 = wrap_index(j + 2, n);
  const size_t s = static_cast<size_t>(n);
  if (order == 2) {
    return torus_jet_rows<2>(nullptr, u + im1 * s, u + i * s, u + ip1 * s, nullptr,
                             nullptr, v + im1 * s, v + i * s, v + ip1 * s, nullptr,
                             0, jm1, j, jp1, 0, map.h());
  }
  return torus_jet_rows<4>(u + im2 * s, u + im1 * s, u + i * s, u + ip1 * s,
                           u + ip2 * s, v + im2 * s, v + im1 * s, v + i * s,
                           v + ip1 * s, v + ip2 * s, jm2, jm1, j, jp1, jp2, map.h());
}

TorusNodeGeometry torus_node_geometry(const TorusJet& jet) {
  TorusNodeGeometry g;
  const double fx1 = 1.0 + jet.ux, fx2 = jet.vx;
  const double fy1 = jet.uy, fy2 = 1.0 + jet.vy;

  g.g11 = 1.0 + fx1 * fx1 + fx2 * fx2;
  g.g12 = fx1 * fy1 + fx2 * fy2;
  g.g22 = 1.0 + fy1 * fy1 + fy2 * fy2;
  g.det = g.g11 * g.g22 - g.g12 * g.g12;
  g.metric_ok = std::isfinite(g.det) && g.det > 0.0 && g.g11 > 0.0;
  if (!g.metric_ok) return g;

  g.dens = std::sqrt(g.det);
  g.jac = fx1 * fy2 - fy1 * fx2;
  g.defect = g.jac - 1.0;
  g.gi11 = g.g22 / g.det;
  g.gi12 = -g.g12 / g.det;
  g.gi22 = g.g11 / g.det;
  g.eta = 2.0 / g.dens;
  g.eta_hodge = (1.0 + g.jac) / g.dens;

  // A_ij = d_ij F - Gamma^k_ij d_k F with Gamma^k_ij = g^{kl} <d_ij F, d_l F>;
  // the ambient is flat so this is the full normal projection.
  const double uij[3] = {jet.uxx, jet.uxy, jet.uyy};
  const double vij[3] = {jet.vxx, jet.vxy, jet.vyy};
  for (int k = 0; k < 3; ++k) {
    const double c1 = uij[k] * fx1 + vij[k] * fx2;
    const double c2 = uij[k] * fy1 + vij[k] * fy2;
    const double gm1 = g.gi11 * c1 + g.gi12 * c2;
    const double gm2 = g.gi12 * c1 + g.gi22 * c2;
    g.A[k] = {-gm1, -gm2, uij[k] - gm1 * fx1 - gm2 * fy1,
              vij[k] - gm1 * fx2 - gm2 * fy2};
  }

  for (int m = 0; m < 4; ++m) {
    g.H[m] = g.gi11 * g.A[0][m] + 2.0 * g.gi12 * g.A[1][m] + g.gi22 * g.A[2][m];
  }
  g.h2 = dot4(g.H, g.H);

  // |A|^2 = g^{ik} g^{jl} <A_ij, A_kl>, done per ambient component.
  g.a2 = 0.0;
  for (int m = 0; m < 4; ++m) {
    const double s11 = g.A[0][m], s12 = g.A[1][m], s22 = g.A[2][m];
    const double t11 = g.gi11 * (g.gi11 * s11 + g.gi12 * s12) +
                       g.gi12 * (g.gi11 * s12 + g.gi12 * s22);
    const double t12 = g.gi11 * (g.gi12 * s11 + g.gi22 * s12) +
                       g.gi12 * (g.gi12 * s12 + g.gi22 * s22);
    const double t22 = g.gi12 * (g.gi12 * s11 + g.gi22 * s12) +
                       g.gi22 * (g.gi12 * s12 + g.gi22 * s22);
    g.a2 += t11 * s11 + 2.0 * t12 * s12 + t22 * s22;
  }

  g.wu = g.gi11 * jet.uxx + 2.0 * g.gi12 * jet.uxy + g.gi22 * jet.uyy;
  g.wv = g.gi11 * jet.vxx + 2.0 * g.gi12 * jet.vxy + g.gi22 * jet.vyy;

  // Orthonormal tangent frame by Gram-Schmidt on (F_x, F_y); J' carries it to
  // a normal frame when the graph is Lagrangian.
  const std::array<double, 4> Fx{1.0, 0.0, fx1, fx2};
  const std::array<double, 4> Fy{0.0, 1.0, fy1, fy2};
  const double r = g.g12 / g.g11;
  const double l1 = std::sqrt(g.g11);
  const double l2 = std::sqrt(g.det / g.g11);

  std::array<double, 4> Ae[2][2];
  for (int m = 0; m < 4; ++m) {
    const double a11 = g.A[0][m] / g.g11;
    const double a12 = (g.A[1][m] - r * g.A[0][m]) / (l1 * l2);
    const double a22 =
        (g.A[2][m] - 2.0 * r * g.A[1][m] + r * r * g.A[0][m]) / (l2 * l2);
    Ae[0][0][m] = a11;
    Ae[0][1][m] = a12;
    Ae[1][0][m] = a12;
    Ae[1][1][m] = a22;
  }
  const std::array<double, 4> JFx = jprime(Fx);
  const std::array<double, 4> JFy = jprime(Fy);
  std::array<double, 4> Je[2];
  for (int m = 0; m < 4; ++m) {
    Je[0][m] = JFx[m] / l1;
    Je[1][m] = (JFy[m] - r * JFx[m]) / l2;
  }
  for (int k = 0; k < 2; ++k) {
    g.sigma[k] = dot4(Je[k], g.H);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g.B[k][i][j] = -dot4(Ae[i][j], Je[k]);
  }

  const double tr = g.gi11 + g.gi22;
  const double disc = tr * tr - 4.0 / g.det;
  g.gi_eig_max = 0.5 * (tr + std::sqrt(std::max(disc, 0.0)));
  return g;
}

namespace {

void check_map(const MapGrid& map, int order) {
  if (map.n < 8) throw ArgumentError("grid resolution must be >= 8");
  if (order != 2 && order != 4) throw ArgumentError("derivative order must be 2 or 4");
  if (map.u.size() != static_cast<size_t>(map.n) * map.n ||
      map.v.size() != static_cast<size_t>(map.n) * map.n)
    throw ArgumentError("map field size does not match resolution");
  if (!map.finite()) throw NumericError("map contains NaN/Inf");
}

}  // namespace

GeometryField compute_geometry(const MapGrid& map, int order) {
  check_map(map, order);
  const int n = map.n;
  const size_t nn = static_cast<size_t>(n) * n;
  GeometryField f;
  f.n = n;
  f.order = order;
  f.h = map.h();
  f.g11.resize(nn);
  f.g12.resize(nn);
  f.g22.resize(nn);
  f.gi11.resize(nn);
  f.gi12.resize(nn);
  f.gi22.resize(nn);
  f.dens.resize(nn);
  f.jac.resize(nn);
  f.defect.resize(nn);
  f.A.resize(nn * 12);
  f.H.resize(nn * 4);
  f.a2.resize(nn);
  f.h2.resize(nn);
  f.eta.resize(nn);
  f.eta_hodge.resize(nn);
  f.B.resize(nn * 8);
  f.sigma.resize(nn * 2);

  std::vector<int> bad(n, -1);
  std::vector<char> nonfinite(n, 0);

  detail::geometry_sweep(map, order, [&](int i, int j, const TorusNodeGeometry& g) {
    if (!g.metric_ok) {
      if (bad[i] < 0) bad[i] = j;
      return;
    }
    const size_t p = f.idx(i, j);
    f.g11[p] = g.g11;
    f.g12[p] = g.g12;
    f.g22[p] = g.g22;
    f.gi11[p] = g.gi11;
    f.gi12[p] = g.gi12;
    f.gi22[p] = g.gi22;
    f.dens[p] = g.dens;
    f.jac[p] = g.jac;
    f.defect[p] = g.defect;
    for (int k = 0; k < 3; ++k)
      for (int m = 0; m < 4; ++m) f.A[p * 12 + k * 4 + m] = g.A[k][m];
    for (int m = 0; m < 4; ++m) f.H[p * 4 + m] = g.H[m];
    f.a2[p] = g.a2;
    f.h2[p] = g.h2;
    f.eta[p] = g.eta;
    f.eta_hodge[p] = g.eta_hodge;
    for (int k = 0; k < 2; ++k) {
      f.sigma[p * 2 + k] = g.sigma[k];
      for (int i2 = 0; i2 < 2; ++i2)
        for (int j2 = 0; j2 < 2; ++j2)
          f.B[p * 8 + k * 4 + i2 * 2 + j2] = g.B[k][i2][j2];
    }
    if (!std::isfinite(g.dens + g.h2 + g.a2)) nonfinite[i] = 1;
  });

  for (int i = 0; i < n; ++i) {
    if (bad[i] >= 0)
      throw DegenerateGraphError("induced metric not positive definite", i, bad[i]);
    if (nonfinite[i]) throw NumericError("NaN/Inf in computed geometry");
  }
  return f;
}

double GeometryField::eta_cross_gap() const {
  double gap = 0;
  for (size_t p = 0; p < eta.size(); ++p)
    gap = std::max(gap, std::abs(eta[p] - eta_hodge[p]));
  return gap;
}

std::vector<double> eta_field(const GeometryField& geom) { return geom.eta; }

DefectNorms lagrangian_defect(const GeometryField& geom) {
  double sup = 0, sum = 0, wsum = 0;
  for (size_t p = 0; p < geom.defect.size(); ++p) {
    sup = std::max(sup, std::abs(geom.defect[p]));
    sum += geom.defect[p] * geom.defect[p] * geom.dens[p];
    wsum += geom.dens[p];
  }
  return {sup, std::sqrt(sum / wsum)};
}

BTensor b_tensor_at(const GeometryField& geom, int i, int j) {
  BTensor b;
  const size_t p = geom.idx(i, j);
  for (int k = 0; k < 2; ++k)
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c) b.v[k][a][c] = geom.B[p * 8 + k * 4 + a * 2 + c];
  return b;
}

BIdentity b_identities(const BTensor& b, double tol) {
  BIdentity r;
  r.b2 = 0;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.b2 += b.v[k][i][j] * b.v[k][i][j];

  const double s1 = -(b.v[0][0][0] + b.v[0][1][1]);
  const double s2 = -(b.v[1][0][0] + b.v[1][1][1]);
  r.sigma2 = s1 * s1 + s2 * s2;
  r.lhs = 2.0 * r.b2 - r.sigma2;

  r.rhs = 0;
  for (int k = 0; k < 2; ++k) {
    const double d = b.v[k][0][0] - b.v[k][1][1];
    r.rhs += d * d + 4.0 * b.v[k][0][1] * b.v[k][0][1];
  }

  r.ratio = r.b2 > 0 ? r.sigma2 / r.b2 : 0.0;

  // full symmetry: compare each entry against its index transpositions
  r.asymmetry = 0;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double x = b.v[k][i][j];
        r.asymmetry = std::max(r.asymmetry, std::abs(x - b.v[k][j][i]));
        r.asymmetry = std::max(r.asymmetry, std::abs(x - b.v[i][k][j]));
        r.asymmetry = std::max(r.asymmetry, std::abs(x - b.v[j][i][k]));
      }
  r.symmetric = r.asymmetry <= tol;
  return r;
}

GeometryAccumulator::GeometryAccumulator(int n, double cell)
    : rows_(n), cell_(cell) {}

void GeometryAccumulator::visit(int i, int j, const TorusNodeGeometry& g) {
  RowAcc& a = rows_[i];
  if (!g.metric_ok) {
    if (a.bad_j < 0) a.bad_j = j;
    return;
  }
  if (!a.touched) {
    a.touched = true;
    a.min_eta = g.eta;
    a.max_eta = g.eta;
    a.min_jac = g.jac;
  } else {
    a.min_eta = std::min(a.min_eta, g.eta);
    a.max_eta = std::max(a.max_eta, g.eta);
    a.min_jac = std::min(a.min_jac, g.jac);
  }
  a.area += g.dens;
  a.int_h2 += g.h2 * g.dens;
  a.int_a2 += g.a2 * g.dens;
  a.defect_w2 += g.defect * g.defect * g.dens;
  a.sup_h2 = std::max(a.sup_h2, g.h2);
  a.sup_a2 = std::max(a.sup_a2, g.a2);
  a.defect_sup = std::max(a.defect_sup, std::abs(g.defect));
  a.gi_eig_max = std::max(a.gi_eig_max, g.gi_eig_max);
  a.eta_gap_max = std::max(a.eta_gap_max, std::abs(g.eta - g.eta_hodge));
  double b2 = 0;
  for (int k = 0; k < 2; ++k)
    for (int i2 = 0; i2 < 2; ++i2)
      for (int j2 = 0; j2 < 2; ++j2) b2 += g.B[k][i2][j2] * g.B[k][i2][j2];
  if (b2 > 1e-14) {
    const double s2 = g.sigma[0] * g.sigma[0] + g.sigma[1] * g.sigma[1];
    a.sigma_ratio_max = std::max(a.sigma_ratio_max, s2 / b2);
  }
  if (!std::isfinite(g.dens + g.h2 + g.a2 + g.wu + g.wv)) a.finite = false;
}

GeometryReduction GeometryAccumulator::finish() const {
  GeometryReduction out;
  out.min_eta = std::numeric_limits<double>::infinity();
  out.max_eta = -std::numeric_limits<double>::infinity();
  out.min_jac = std::numeric_limits<double>::infinity();
  double area_sum = 0, defect_w2 = 0;
  for (size_t i = 0; i < rows_.size(); ++i) {
    const RowAcc& a = rows_[i];
    if (a.bad_j >= 0 && out.metric_ok) {
      out.metric_ok = false;
      out.bad_i = static_cast<int>(i);
      out.bad_j = a.bad_j;
    }
    if (!a.finite) out.finite = false;
    if (!a.touched) continue;
    area_sum += a.area;
    out.int_h2 += a.int_h2;
    out.int_a2 += a.int_a2;
    defect_w2 += a.defect_w2;
    out.sup_h2 = std::max(out.sup_h2, a.sup_h2);
    out.sup_a2 = std::max(out.sup_a2, a.sup_a2);
    out.defect_sup = std::max(out.defect_sup, a.defect_sup);
    out.min_eta = std::min(out.min_eta, a.min_eta);
    out.max_eta = std::max(out.max_eta, a.max_eta);
    out.min_jac = std::min(out.min_jac, a.min_jac);
    out.gi_eig_max = std::max(out.gi_eig_max, a.gi_eig_max);
    out.sigma_ratio_max = std::max(out.sigma_ratio_max, a.sigma_ratio_max);
    out.eta_gap_max = std::max(out.eta_gap_max, a.eta_gap_max);
  }
  out.area = area_sum * cell_;
  out.int_h2 *= cell_;
  out.int_a2 *= cell_;
  out.defect_l2 = area_sum > 0 ? std::sqrt(defect_w2 / area_sum) : 0.0;
  return out;
}

GeometryReduction reduce_geometry(const MapGrid& map, int order) {
  check_map(map, order);
  GeometryAccumulator acc(map.n, map.h() * map.h());
  detail::geometry_sweep(map, order, [&](int i, int j, const TorusNodeGeometry& g) {
    acc.visit(i, j, g);
  });
  return acc.finish();
}

TorusNodeGeometry geometry_at(const MapGrid& map, int order, int i, int j) {
  check_map(map, order);
  return torus_node_geometry(torus_jet_at(map, order, i, j));
}

}  // namespace lagflow
