#pragma once

#include <array>
#include <string>
#include <vector>

#include "lagflow/geometry.hpp"
#include "lagflow/grid.hpp"

namespace lagflow {

/// One time-stamped record of every monitored scalar.  The CSV column order
/// is fixed; see observables_csv_header().
struct ObservableRow {
  double t = 0;
  double dt = 0;
  double area = 0;
  double min_eta = 0;
  double max_eta = 0;
  double eta_bound = 0;
  double sup_H2 = 0;
  double int_H2 = 0;
  double sup_A2 = 0;
  double int_A2 = 0;
  double lag_defect_sup = 0;
  double lag_defect_l2 = 0;
  double max_rho = 0;
  double willmore = 0;
  double sigma_ratio_max = 0;
  double twist_residual_sup = 0;
};

std::string observables_csv_header();
std::string observables_csv_row(const ObservableRow& row);
void write_observables_csv(const std::string& path,
                           const std::vector<ObservableRow>& rows);
std::vector<ObservableRow> read_observables_csv(const std::string& path);

/// Lower bound for min eta along the flow,
///   alpha e^{ct} / sqrt(1 + alpha^2 e^{2ct}),  alpha/sqrt(1+alpha^2) = eta0.
/// c = 0 degenerates to the constant eta0; eta0 = 1 returns 1.
double comparison_bound(double t, double eta0_min, int c);

/// Same bound through an algebraically rearranged long-double route,
///   1 / sqrt(1 + (1 - eta0^2)/eta0^2 * e^{-2ct}),
/// used as an independent high-precision check.
double comparison_bound_highprec(double t, double eta0_min, int c);

/// Max over nodes of the distance to the diagonal: cross-factor distance
/// over sqrt(2), wrapped on the torus, great-circle on the sphere.
double max_rho(const MapGrid& map);
double max_rho(const TwistProfile& profile);

/// F = 1/2 int |H|^2 dmu - chi  (chi = 0 torus, 2 sphere).
double willmore(const GeometryField& geom, int chi);
double willmore_from_integral(double int_h2, int chi);

/// Centre and scale of a parabolic rescaling / density evaluation.
struct RescaleSpec {
  std::array<double, 4> center{0, 0, 0, 0};
  double t0 = 0;
  double lambda = 1.0;
};

/// Gaussian density of a torus snapshot against the backward heat kernel
///   rho(y, t) = (4 pi (t0 - t))^{-1} exp(-|y - y0|^2 / (4 (t0 - t))),
/// integrated over the lift of the graph to R^4.  The lift is the single
/// sheet F(x) = (x, f(x)) over the plane; the quadrature sums the diagonal
/// lattice translates (m, m), m in Z^2, and drops translates once the
/// kernel factor falls below 1e-16.  Requires t < t0.
double gaussian_density(const MapGrid& map, const RescaleSpec& spec, double t);

/// Snapshot series as read back from an output directory.
struct SnapshotSeries {
  std::vector<double> times;
  std::vector<MapGrid> maps;
};

/// Density trace: one (t, density) pair per snapshot with t < t0.
std::vector<std::pair<double, double>> density_trace(const SnapshotSeries& series,
                                                     const RescaleSpec& spec);

struct SpacetimePoint {
  std::array<double, 4> x{0, 0, 0, 0};
  double t = 0;
};

/// (x, t) -> (lambda (x - x0), lambda^2 (t - t0)).
std::vector<SpacetimePoint> parabolic_rescale(const std::vector<SpacetimePoint>& points,
                                              const RescaleSpec& spec);

void write_point_set(const std::string& path, const std::vector<SpacetimePoint>& pts);
std::vector<SpacetimePoint> read_point_set(const std::string& path);

/// Surface samples of one snapshot (the lifted positions), for rescaling.
std::vector<SpacetimePoint> sample_surface(const MapGrid& map, double t);

}  // namespace lagflow
