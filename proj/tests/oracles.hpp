// Independent oracles used by the unit and acceptance suites.  Everything in
// this header is computed along routes the library does not use: literal
// index expansions, closed forms derived by hand for one-parameter families,
// long-double evaluation, and divergence-form mean curvature with numeric
// theta-differentiation.  Tests freeze values produced here and compare the
// library against them.
#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "lagflow/geometry.hpp"

namespace oracles {

// ---------------------------------------------------------------------------
// Shear family u = a sin(2 pi k y), v = 0.  With w = u_y and z = u_yy the
// graph geometry collapses to closed forms:
//   g = [[2, w], [w, 2 + w^2]],  det = 4 + w^2,
//   A_yy = (z/det) (-2, -w, 2, -w),  all other A components zero,
//   H = (2 z / det^2) (-2, -w, 2, -w),
//   |A|^2 = |H|^2 = 8 z^2 / det^3,   eta = 2 / sqrt(det).
struct ShearOracle {
  double a;
  int k;

  double w(double y) const { return 2.0 * M_PI * k * a * std::cos(2.0 * M_PI * k * y); }
  double z(double y) const {
    const double c = 2.0 * M_PI * k;
    return -c * c * a * std::sin(2.0 * M_PI * k * y);
  }
  double det(double y) const { return 4.0 + w(y) * w(y); }
  double eta(double y) const { return 2.0 / std::sqrt(det(y)); }
  double a2(double y) const {
    const double d = det(y);
    return 8.0 * z(y) * z(y) / (d * d * d);
  }
  double h2(double y) const { return a2(y); }
  std::array<double, 4> H(double y) const {
    const double d = det(y);
    const double c = 2.0 * z(y) / (d * d);
    return {-2.0 * c, -w(y) * c, 2.0 * c, -w(y) * c};
  }
};

// ---------------------------------------------------------------------------
// Literal expansion of the curvature identity: build the h-arrays from B and
// sum the indices exactly as written, without the simplified intermediate
// forms the library uses.
struct BruteForceB {
  double b2 = 0;
  double sigma2 = 0;
  double lhs = 0;
  double rhs = 0;
};

inline BruteForceB brute_force_b(const lagflow::BTensor& b) {
  BruteForceB out;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out.b2 += b.v[k][i][j] * b.v[k][i][j];

  double sigma[2];
  for (int k = 0; k < 2; ++k) {
    sigma[k] = 0;
    for (int i = 0; i < 2; ++i) sigma[k] -= b.v[k][i][i];
    out.sigma2 += sigma[k] * sigma[k];
  }
  out.lhs = 2.0 * out.b2 - out.sigma2;

  // h_{3ij} = -B_{1ij}, h_{4ij} = -B_{2ij}
  double h3[2][2], h4[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      h3[i][j] = -b.v[0][i][j];
      h4[i][j] = -b.v[1][i][j];
    }
  for (int k = 0; k < 2; ++k) {
    const double d1 = h3[0][k] - h4[1][k];
    const double d2 = h3[1][k] + h4[0][k];
    out.rhs += d1 * d1 + d2 * d2;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Long-double evaluation of the eta comparison lower bound through the
// rearranged closed form 1 / sqrt(1 + (1 - eta0^2)/eta0^2 * exp(-2 c t)).
inline double bound_highprec(double t, double eta0, int c) {
  if (eta0 >= 1.0) return 1.0;
  if (c == 0) return eta0;
  const long double e0 = eta0;
  const long double inv_alpha2 = (1.0L - e0 * e0) / (e0 * e0);
  return static_cast<double>(1.0L / sqrtl(1.0L + inv_alpha2 * expl(-2.0L * (long double)t)));
}

// ---------------------------------------------------------------------------
// Divergence-form mean curvature of a twist surface with an analytic profile:
//   Delta F = (1/W) d/dtheta [ W (g^tt F_t + g^tp F_p) ]
//             + g^pt F_tp + g^pp F_pp,
// with the theta derivative taken numerically (Richardson on central
// differences), then projected off the two radial directions and the
// tangents.  Completely separate from the closed-form kernel in the library.
struct TwistSurface {
  std::function<double(double)> h;
  std::function<double(double)> hp;

  std::array<double, 6> Ft(double theta) const {
    const double s = std::sin(theta), c = std::cos(theta);
    const double ps = std::sin(h(theta)), pc = std::cos(h(theta));
    const double d = hp(theta);
    return {c, 0, -s, c * pc - s * d * ps, c * ps + s * d * pc, -s};
  }
  std::array<double, 6> Fp(double theta) const {
    const double s = std::sin(theta);
    const double ps = std::sin(h(theta)), pc = std::cos(h(theta));
    return {0, s, 0, -s * ps, s * pc, 0};
  }
  std::array<double, 6> Ftp(double theta) const {
    const double s = std::sin(theta), c = std::cos(theta);
    const double ps = std::sin(h(theta)), pc = std::cos(h(theta));
    const double d = hp(theta);
    return {0, c, 0, -s * d * pc - c * ps, -s * d * ps + c * pc, 0};
  }
  std::array<double, 6> Fpp(double theta) const {
    const double s = std::sin(theta);
    const double ps = std::sin(h(theta)), pc = std::cos(h(theta));
    return {-s, 0, 0, -s * pc, -s * ps, 0};
  }

  // W (g^tt F_t + g^tp F_p), all closed form in theta
  std::array<double, 6> bracket(double theta) const {
    const double s = std::sin(theta);
    const double d = hp(theta);
    const double g11 = 2.0 + d * d * s * s;
    const double g12 = d * s * s;
    const double g22 = 2.0 * s * s;
    const double det = g11 * g22 - g12 * g12;
    const double W = std::sqrt(det);
    const auto ft = Ft(theta);
    const auto fp = Fp(theta);
    std::array<double, 6> out;
    for (int k = 0; k < 6; ++k)
      out[k] = W * ((g22 / det) * ft[k] + (-g12 / det) * fp[k]);
    return out;
  }

  std::array<double, 6> mean_curvature(double theta) const {
    const double s = std::sin(theta), c = std::cos(theta);
    const double ps = std::sin(h(theta)), pc = std::cos(h(theta));
    const double d = hp(theta);
    const double g11 = 2.0 + d * d * s * s;
    const double g12 = d * s * s;
    const double g22 = 2.0 * s * s;
    const double det = g11 * g22 - g12 * g12;
    const double W = std::sqrt(det);

    // Richardson-extrapolated central difference of the bracket
    const double delta = 1e-4;
    std::array<double, 6> d1, d2, dG;
    const auto bp = bracket(theta + delta), bm = bracket(theta - delta);
    const auto bp2 = bracket(theta + 2.0 * delta), bm2 = bracket(theta - 2.0 * delta);
    for (int k = 0; k < 6; ++k) {
      d1[k] = (bp[k] - bm[k]) / (2.0 * delta);
      d2[k] = (bp2[k] - bm2[k]) / (4.0 * delta);
      dG[k] = (4.0 * d1[k] - d2[k]) / 3.0;
    }

    const auto ftp = Ftp(theta);
    const auto fpp = Fpp(theta);
    std::array<double, 6> lap;
    for (int k = 0; k < 6; ++k)
      lap[k] = dG[k] / W + (-g12 / det) * ftp[k] + (g11 / det) * fpp[k];

    const std::array<double, 6> n1{s, 0, c, 0, 0, 0};
    const std::array<double, 6> n2{0, 0, 0, s * pc, s * ps, c};
    auto dot = [](const std::array<double, 6>& x, const std::array<double, 6>& y) {
      double acc = 0;
      for (int k = 0; k < 6; ++k) acc += x[k] * y[k];
      return acc;
    };
    const double r1 = dot(lap, n1), r2 = dot(lap, n2);
    std::array<double, 6> Hvec;
    for (int k = 0; k < 6; ++k) Hvec[k] = lap[k] - r1 * n1[k] - r2 * n2[k];

    // remove any tangential residue of the numeric differentiation
    const auto ft = Ft(theta);
    const auto fp = Fp(theta);
    const double c1 = dot(Hvec, ft), c2 = dot(Hvec, fp);
    const double a1 = (g22 * c1 - g12 * c2) / det;
    const double a2 = (-g12 * c1 + g11 * c2) / det;
    for (int k = 0; k < 6; ++k) Hvec[k] -= a1 * ft[k] + a2 * fp[k];
    return Hvec;
  }
};

}  // namespace oracles
