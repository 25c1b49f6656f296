#include "lagflow/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "lagflow/errors.hpp"
#include "lagflow/observables.hpp"

namespace lagflow {

namespace {

inline std::array<double, 3> cross3(const std::array<double, 3>& a,
                                    const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

inline std::array<double, 3> head(const Vec6& x) { return {x[0], x[1], x[2]}; }
inline std::array<double, 3> tail(const Vec6& x) { return {x[3], x[4], x[5]}; }

inline Vec6 join(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[0], a[1], a[2], b[0], b[1], b[2]};
}

/// J' of omega_1 - omega_2 on S^2 x S^2: factor-wise 90-degree rotations,
/// (X1, X2) -> (p x X1, -(q x X2)).
inline Vec6 jprime_sphere(const Vec6& x, const std::array<double, 3>& p,
                          const std::array<double, 3>& q) {
  const auto a = cross3(p, head(x));
  auto b = cross3(q, tail(x));
  for (auto& c : b) c = -c;
  return join(a, b);
}

}  // namespace

SphereJet sphere_jet_at(const TwistProfile& profile, int i) {
  const int m = profile.m;
  const double d = profile.dtheta();
  const auto& h = profile.h;
  // even ghost reflection across both poles
  const double hm = i > 0 ? h[i - 1] : h[0];
  const double hp = i < m - 1 ? h[i + 1] : h[m - 1];
  SphereJet jet;
  jet.theta = profile.theta(i);
  jet.h = h[i];
  jet.hp = (hp - hm) / (2.0 * d);
  jet.hpp = (hp - 2.0 * h[i] + hm) / (d * d);
  return jet;
}

SphereNodeGeometry sphere_node_geometry(const SphereJet& jet) {
  SphereNodeGeometry g;
  const double s = std::sin(jet.theta);
  const double c = std::cos(jet.theta);
  const double cp = std::cos(jet.h);
  const double sp = std::sin(jet.h);
  const double hp = jet.hp, hpp = jet.hpp;

  const std::array<double, 3> er{cp, sp, 0.0};
  const std::array<double, 3> epsi{-sp, cp, 0.0};
  const std::array<double, 3> ez{0.0, 0.0, 1.0};
  const std::array<double, 3> p{s, 0.0, c};
  const std::array<double, 3> pt{c, 0.0, -s};
  const std::array<double, 3> pp{0.0, s, 0.0};

  auto lin = [](double a, const std::array<double, 3>& x, double b,
                const std::array<double, 3>& y, double e,
                const std::array<double, 3>& z) -> std::array<double, 3> {
    return {a * x[0] + b * y[0] + e * z[0], a * x[1] + b * y[1] + e * z[1],
            a * x[2] + b * y[2] + e * z[2]};
  };

  const auto q = lin(s, er, c, ez, 0.0, ez);
  const auto qt = lin(c, er, s * hp, epsi, -s, ez);
  const auto qp = lin(s, epsi, 0.0, er, 0.0, er);
  const auto qtt = lin(-s - s * hp * hp, er, 2.0 * c * hp + s * hpp, epsi, -c, ez);
  const auto qtp = lin(-s * hp, er, c, epsi, 0.0, ez);
  const auto qpp = lin(-s, er, 0.0, er, 0.0, er);

  g.F = join(p, q);
  g.Ft = join(pt, qt);
  g.Fp = join(pp, qp);
  const Vec6 Ftt = join({-s, 0.0, -c}, qtt);
  const Vec6 Ftp = join({0.0, c, 0.0}, qtp);
  const Vec6 Fpp = join({-s, 0.0, 0.0}, qpp);
  const Vec6 n1 = join(p, {0.0, 0.0, 0.0});
  const Vec6 n2 = join({0.0, 0.0, 0.0}, q);

  g.g11 = dot6(g.Ft, g.Ft);
  g.g12 = dot6(g.Ft, g.Fp);
  g.g22 = dot6(g.Fp, g.Fp);
  g.det = g.g11 * g.g22 - g.g12 * g.g12;
  g.ok = std::isfinite(g.det) && g.det > 0.0 && g.g11 > 0.0;
  if (!g.ok) return g;
  g.dens = std::sqrt(g.det);
  g.gi11 = g.g22 / g.det;
  g.gi12 = -g.g12 / g.det;
  g.gi22 = g.g11 / g.det;
  g.gthth_inv = g.gi11;
  g.eta = 2.0 / std::sqrt(4.0 + hp * hp * s * s);

  // Second fundamental form of the surface inside S^2 x S^2: remove the two
  // radial directions (the ambient normals) and the Gamma^k_ij F_k part.
  const Vec6* Fij[3] = {&Ftt, &Ftp, &Fpp};
  Vec6 A[3];
  for (int k = 0; k < 3; ++k) {
    const Vec6& w = *Fij[k];
    const double c1 = dot6(w, g.Ft);
    const double c2 = dot6(w, g.Fp);
    const double gm1 = g.gi11 * c1 + g.gi12 * c2;
    const double gm2 = g.gi12 * c1 + g.gi22 * c2;
    const double r1 = dot6(w, n1);
    const double r2 = dot6(w, n2);
    for (int a = 0; a < 6; ++a)
      A[k][a] = w[a] - r1 * n1[a] - r2 * n2[a] - gm1 * g.Ft[a] - gm2 * g.Fp[a];
  }

  for (int a = 0; a < 6; ++a)
    g.H[a] = g.gi11 * A[0][a] + 2.0 * g.gi12 * A[1][a] + g.gi22 * A[2][a];
  g.h2 = dot6(g.H, g.H);

  g.a2 = 0.0;
  for (int a = 0; a < 6; ++a) {
    const double s11 = A[0][a], s12 = A[1][a], s22 = A[2][a];
    const double t11 = g.gi11 * (g.gi11 * s11 + g.gi12 * s12) +
                       g.gi12 * (g.gi11 * s12 + g.gi12 * s22);
    const double t12 = g.gi11 * (g.gi12 * s11 + g.gi22 * s12) +
                       g.gi12 * (g.gi12 * s12 + g.gi22 * s22);
    const double t22 = g.gi12 * (g.gi12 * s11 + g.gi22 * s12) +
                       g.gi22 * (g.gi12 * s12 + g.gi22 * s22);
    g.a2 += t11 * s11 + 2.0 * t12 * s12 + t22 * s22;
  }

  // Twist deformation field dF/dh = (0, dq/dphi); its normal part carries the
  // reduced velocity.
  const Vec6 V = join({0.0, 0.0, 0.0}, qp);
  const double c1 = dot6(V, g.Ft);
  const double c2 = dot6(V, g.Fp);
  const double a1 = g.gi11 * c1 + g.gi12 * c2;
  const double a2c = g.gi12 * c1 + g.gi22 * c2;
  for (int a = 0; a < 6; ++a) g.vperp[a] = V[a] - a1 * g.Ft[a] - a2c * g.Fp[a];
  g.vperp_norm2 = dot6(g.vperp, g.vperp);
  if (g.vperp_norm2 < 1e-20) {
    g.ok = false;  // twist field degenerate (only possible at the poles)
    return g;
  }
  g.hdot = dot6(g.H, g.vperp) / g.vperp_norm2;
  Vec6 res;
  for (int a = 0; a < 6; ++a) res[a] = g.H[a] - g.hdot * g.vperp[a];
  g.residual = std::sqrt(dot6(res, res));

  // Orthonormal frame and the tangential avatars of A and H.
  const double r = g.g12 / g.g11;
  const double l1 = std::sqrt(g.g11);
  const double l2 = std::sqrt(g.det / g.g11);
  Vec6 e[2], Je[2];
  for (int a = 0; a < 6; ++a) {
    e[0][a] = g.Ft[a] / l1;
    e[1][a] = (g.Fp[a] - r * g.Ft[a]) / l2;
  }
  Je[0] = jprime_sphere(e[0], p, q);
  Je[1] = jprime_sphere(e[1], p, q);
  Vec6 Ae[2][2];
  for (int a = 0; a < 6; ++a) {
    const double a11 = A[0][a] / g.g11;
    const double a12 = (A[1][a] - r * A[0][a]) / (l1 * l2);
    const double a22 = (A[2][a] - 2.0 * r * A[1][a] + r * r * A[0][a]) / (l2 * l2);
    Ae[0][0][a] = a11;
    Ae[0][1][a] = a12;
    Ae[1][0][a] = a12;
    Ae[1][1][a] = a22;
  }
  for (int k = 0; k < 2; ++k) {
    g.sigma[k] = dot6(Je[k], g.H);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g.B[k][i][j] = -dot6(Ae[i][j], Je[k]);
  }

  double cosd = s * s * cp + c * c;
  cosd = std::min(1.0, std::max(-1.0, cosd));
  g.rho = std::acos(cosd) / std::sqrt(2.0);
  return g;
}

namespace {

void check_profile(const TwistProfile& profile) {
  if (profile.m < 32) throw ArgumentError("twist profile needs m >= 32 nodes");
  if (profile.h.size() != static_cast<size_t>(profile.m))
    throw ArgumentError("profile size does not match m");
  if (!profile.finite()) throw NumericError("profile contains NaN/Inf");
}

struct SphereReduction {
  double area = 0, int_h2 = 0, int_a2 = 0;
  double sup_h2 = 0, sup_a2 = 0;
  double min_eta = std::numeric_limits<double>::infinity();
  double max_eta = -std::numeric_limits<double>::infinity();
  double residual_sup = 0;
  double rho_max = 0;
  double gthth_inv_max = 0;
  double sigma_ratio_max = 0;
  double drift = 0;
  bool finite = true;
  bool ok = true;
  int bad = -1;
};

SphereReduction reduce_sphere(const TwistProfile& profile,
                              std::vector<double>* hdot_out) {
  SphereReduction r;
  const int m = profile.m;
  const double d = profile.dtheta();
  double mean = 0;
  for (double x : profile.h) mean += x;
  mean /= m;
  double area = 0, ih2 = 0, ia2 = 0;
  for (int i = 0; i < m; ++i) {
    const SphereNodeGeometry g = sphere_node_geometry(sphere_jet_at(profile, i));
    if (!g.ok) {
      r.ok = false;
      if (r.bad < 0) r.bad = i;
      return r;
    }
    if (hdot_out) (*hdot_out)[i] = g.hdot;
    area += g.dens;
    ih2 += g.h2 * g.dens;
    ia2 += g.a2 * g.dens;
    r.sup_h2 = std::max(r.sup_h2, g.h2);
    r.sup_a2 = std::max(r.sup_a2, g.a2);
    r.min_eta = std::min(r.min_eta, g.eta);
    r.max_eta = std::max(r.max_eta, g.eta);
    r.residual_sup = std::max(r.residual_sup, g.residual);
    r.rho_max = std::max(r.rho_max, g.rho);
    r.gthth_inv_max = std::max(r.gthth_inv_max, g.gthth_inv);
    r.drift = std::max(r.drift, std::abs(profile.h[i] - mean));
    double b2 = 0;
    for (int k = 0; k < 2; ++k)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) b2 += g.B[k][a][b] * g.B[k][a][b];
    if (b2 > 1e-14) {
      const double s2 = g.sigma[0] * g.sigma[0] + g.sigma[1] * g.sigma[1];
      r.sigma_ratio_max = std::max(r.sigma_ratio_max, s2 / b2);
    }
    if (!std::isfinite(g.dens + g.h2 + g.a2 + g.hdot)) r.finite = false;
  }
  const double two_pi = 2.0 * M_PI;
  r.area = two_pi * area * d;
  r.int_h2 = two_pi * ih2 * d;
  r.int_a2 = two_pi * ia2 * d;
  return r;
}

ObservableRow sphere_row(const SphereReduction& r, double t, double dt,
                         double eta0_min, double t_start) {
  ObservableRow row;
  row.t = t;
  row.dt = dt;
  row.area = r.area;
  row.min_eta = r.min_eta;
  row.max_eta = r.max_eta;
  row.eta_bound = comparison_bound(t - t_start, std::min(eta0_min, 1.0), 1);
  row.sup_H2 = r.sup_h2;
  row.int_H2 = r.int_h2;
  row.sup_A2 = r.sup_a2;
  row.int_A2 = r.int_a2;
  row.lag_defect_sup = 0.0;  // twist maps are exactly area preserving
  row.lag_defect_l2 = 0.0;
  row.max_rho = r.rho_max;
  row.willmore = willmore_from_integral(r.int_h2, 2);
  row.sigma_ratio_max = r.sigma_ratio_max;
  row.twist_residual_sup = r.residual_sup;
  return row;
}

}  // namespace

SphereGeometry sphere_geometry(const TwistProfile& profile) {
  check_profile(profile);
  const int m = profile.m;
  SphereGeometry f;
  f.m = m;
  f.dtheta = profile.dtheta();
  f.theta.resize(m);
  f.F.resize(6 * m);
  f.H.resize(6 * m);
  f.g11.resize(m);
  f.g12.resize(m);
  f.g22.resize(m);
  f.dens.resize(m);
  f.a2.resize(m);
  f.h2.resize(m);
  f.eta.resize(m);
  f.hdot.resize(m);
  f.residual.resize(m);
  f.B.resize(8 * m);
  f.sigma.resize(2 * m);
  for (int i = 0; i < m; ++i) {
    const SphereNodeGeometry g = sphere_node_geometry(sphere_jet_at(profile, i));
    if (!g.ok)
      throw DegenerateGraphError("sphere geometry degenerate", i, 0);
    f.theta[i] = profile.theta(i);
    for (int a = 0; a < 6; ++a) {
      f.F[6 * i + a] = g.F[a];
      f.H[6 * i + a] = g.H[a];
    }
    f.g11[i] = g.g11;
    f.g12[i] = g.g12;
    f.g22[i] = g.g22;
    f.dens[i] = g.dens;
    f.a2[i] = g.a2;
    f.h2[i] = g.h2;
    f.eta[i] = g.eta;
    f.hdot[i] = g.hdot;
    f.residual[i] = g.residual;
    for (int k = 0; k < 2; ++k) {
      f.sigma[2 * i + k] = g.sigma[k];
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          f.B[8 * i + k * 4 + a * 2 + b] = g.B[k][a][b];
    }
  }
  return f;
}

double SphereGeometry::normality_defect() const {
  double worst = 0;
  for (int i = 0; i < m; ++i) {
    Vec6 Hv, Fv;
    for (int a = 0; a < 6; ++a) {
      Hv[a] = H[6 * i + a];
      Fv[a] = F[6 * i + a];
    }
    const Vec6 n1{Fv[0], Fv[1], Fv[2], 0, 0, 0};
    const Vec6 n2{0, 0, 0, Fv[3], Fv[4], Fv[5]};
    worst = std::max(worst, std::abs(dot6(Hv, n1)));
    worst = std::max(worst, std::abs(dot6(Hv, n2)));
    // tangents re-derived from the stored profile are not kept; the radial
    // checks are the binding ones for the product structure
  }
  return worst;
}

TwistVelocity twist_velocity(const SphereGeometry& geom) {
  return {geom.hdot, geom.residual};
}

ObservableRow assemble_sphere_row(const TwistProfile& profile, double t, double dt,
                                  double eta0_min) {
  check_profile(profile);
  const SphereReduction r = reduce_sphere(profile, nullptr);
  if (!r.ok) throw DegenerateGraphError("sphere geometry degenerate", r.bad, 0);
  return sphere_row(r, t, dt, eta0_min, 0.0);
}

SphereRunResult run_sphere(const FlowConfig& config, const TwistProfile& initial,
                           double t_start, long step_start,
                           const SphereObserver& observer) {
  validate_flow_config(config);
  check_profile(initial);

  SphereRunResult result;
  result.final_profile = initial;
  TwistProfile& profile = result.final_profile;
  RunSummary& sum = result.summary;

  const int m = profile.m;
  const double d = profile.dtheta();
  std::vector<double> hdot(m, 0.0);

  double t = t_start;
  long step_index = step_start;
  double dt = 0.0;
  long last_recorded = -1;

  SphereReduction r = reduce_sphere(profile, &hdot);
  sum.eta0_min = r.min_eta;
  sum.area_initial = r.area;

  auto record = [&](double row_dt) {
    ObservableRow row = sphere_row(r, t, row_dt, sum.eta0_min, t_start);
    sum.history.push_back(row);
    last_recorded = step_index;
    if (observer) observer(profile, row);
  };

  auto finish = [&](Termination why, const std::string& msg) {
    sum.termination = why;
    sum.message = msg;
    sum.steps = step_index - step_start;
    sum.t_final = t;
    sum.dt_final = dt;
    sum.area_final = r.area;
    sum.drift_final = r.drift;
    if (why != Termination::NumericAbort && r.ok && last_recorded != step_index)
      record(dt);
    return result;
  };

  if (!r.ok || !r.finite)
    return finish(Termination::NumericAbort, "initial profile yields bad geometry");

  record(0.0);

  for (;;) {
    if (config.stop_h_sup > 0.0 && std::sqrt(r.sup_h2) < config.stop_h_sup)
      return finish(Termination::ReachedStopHSup, "sup |H| below threshold");
    if (t >= config.t_end - 1e-15 * std::max(1.0, config.t_end))
      return finish(Termination::ReachedTEnd, "reached t_end");
    if (step_index - step_start >= config.max_steps)
      return finish(Termination::StepGuard, "max_steps guard tripped");

    dt = std::min(config.cfl * d * d / (2.0 * r.gthth_inv_max), config.t_end - t);
    sum.h2_time_integral += r.int_h2 * dt;

    for (int i = 0; i < m; ++i) profile.h[i] += dt * hdot[i];
    t += dt;
    ++step_index;

    r = reduce_sphere(profile, &hdot);
    if (!r.ok)
      return finish(Termination::DegeneracyAbort, "sphere geometry degenerate");
    if (!r.finite)
      return finish(Termination::NumericAbort, "NaN/Inf detected during flow");
    if (r.sup_a2 * d * d > 1.0)
      return finish(Termination::DegeneracyAbort,
                    "curvature no longer resolved: max |A|^2 dtheta^2 > 1");

    if ((step_index - step_start) % config.observe_every == 0) record(dt);
    if (config.checkpoint_every > 0 &&
        (step_index - step_start) % config.checkpoint_every == 0) {
      write_twist_checkpoint(config.checkpoint_dir + "/checkpoint_" +
                                 std::to_string(step_index),
                             profile, t, step_index);
    }
  }
}

void write_twist_checkpoint(const std::string& prefix, const TwistProfile& profile,
                            double t, long step) {
  write_twist_snapshot(prefix + ".snapshot", profile);
  std::ofstream meta(prefix + ".meta");
  if (!meta) throw IoError("cannot open for writing: " + prefix + ".meta");
  meta << "# t=" << format_g17(t) << " step=" << step << "\n";
  if (!meta) throw IoError("write failed: " + prefix + ".meta");
}

}  // namespace lagflow
