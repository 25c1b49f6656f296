#pragma once

#include <array>
#include <string>
#include <vector>

#include "lagflow/flow.hpp"
#include "lagflow/grid.hpp"

namespace lagflow {

// Twist surfaces in S^2 x S^2: the graph of (theta, phi) -> (theta, phi + h)
// embedded through F = (p, q) in R^3 x R^3 with |p| = |q| = 1.  Everything is
// evaluated on the phi = 0 line; the S^1 action supplies phi-derivatives in
// closed form, and the only discretised inputs are h' and h'' of the profile
// (one-sided ghost reflection at the poles).  Constant profiles therefore
// have exactly vanishing discrete velocity.

using Vec6 = std::array<double, 6>;

inline double dot6(const Vec6& a, const Vec6& b) {
  double s = 0;
  for (int k = 0; k < 6; ++k) s += a[k] * b[k];
  return s;
}

/// Profile value and its two discretised derivatives at one node.
struct SphereJet {
  double theta;
  double h;
  double hp;
  double hpp;
};

struct SphereNodeGeometry {
  Vec6 F;                   // embedded point (p, q)
  Vec6 Ft, Fp;              // tangents along theta and phi
  double g11, g12, g22;     // induced metric (theta, phi)
  double det, dens;         // det g, sqrt(det g)
  double gi11, gi12, gi22;  // inverse metric
  Vec6 H;                   // mean curvature in S^2 x S^2
  double h2, a2;
  double eta;               // 2 / sqrt(4 + h'^2 sin^2 theta)
  Vec6 vperp;               // normal part of the twist deformation field (0, dq/dphi)
  double vperp_norm2;
  double hdot;              // <H, vperp> / |vperp|^2
  double residual;          // |H - hdot vperp|
  double B[2][2][2];
  double sigma[2];
  double rho;               // distance to the diagonal / sqrt(2)
  double gthth_inv;         // g^{theta theta}, the 1-D CFL coefficient
  bool ok;
};

SphereNodeGeometry sphere_node_geometry(const SphereJet& jet);

/// Ghost-reflected derivative estimates of the profile at node i.
SphereJet sphere_jet_at(const TwistProfile& profile, int i);

struct SphereGeometry {
  int m = 0;
  double dtheta = 0;
  std::vector<double> theta;
  std::vector<double> F;  // 6 per node
  std::vector<double> H;  // 6 per node
  std::vector<double> g11, g12, g22, dens;
  std::vector<double> a2, h2, eta;
  std::vector<double> hdot, residual;
  std::vector<double> B;      // 8 per node
  std::vector<double> sigma;  // 2 per node

  /// max over nodes of |<H, (p,0)>|, |<H, (0,q)>|, |<H, F_theta>|, |<H, F_phi>|
  double normality_defect() const;
};

SphereGeometry sphere_geometry(const TwistProfile& profile);

/// Reduced flow velocity and the consistency residual, per node.
struct TwistVelocity {
  std::vector<double> hdot;
  std::vector<double> residual;
};
TwistVelocity twist_velocity(const SphereGeometry& geom);

struct SphereRunResult {
  RunSummary summary;
  TwistProfile final_profile;
};

using SphereObserver = std::function<void(const TwistProfile&, const ObservableRow&)>;

/// Forward-Euler twist flow with dt = cfl dtheta^2 / (2 max g^{theta theta}).
/// Monitor rows use c = 1 for the eta comparison bound and chi = 2.
SphereRunResult run_sphere(const FlowConfig& config, const TwistProfile& initial,
                           double t_start = 0.0, long step_start = 0,
                           const SphereObserver& observer = {});

ObservableRow assemble_sphere_row(const TwistProfile& profile, double t, double dt,
                                  double eta0_min);

void write_twist_checkpoint(const std::string& prefix, const TwistProfile& profile,
                            double t, long step);

}  // namespace lagflow
