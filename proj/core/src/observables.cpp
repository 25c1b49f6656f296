#include "lagflow/observables.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "lagflow/errors.hpp"
#include "lagflow/parallel.hpp"

namespace lagflow {

namespace {
constexpr const char* kCsvHeader =
    "t,dt,area,min_eta,max_eta,eta_bound,sup_H2,int_H2,sup_A2,int_A2,"
    "lag_defect_sup,lag_defect_l2,max_rho,willmore,sigma_ratio_max,"
    "twist_residual_sup";
}

std::string observables_csv_header() { return kCsvHeader; }

std::string observables_csv_row(const ObservableRow& r) {
  const double vals[16] = {r.t,
                           r.dt,
                           r.area,
                           r.min_eta,
                           r.max_eta,
                           r.eta_bound,
                           r.sup_H2,
                           r.int_H2,
                           r.sup_A2,
                           r.int_A2,
                           r.lag_defect_sup,
                           r.lag_defect_l2,
                           r.max_rho,
                           r.willmore,
                           r.sigma_ratio_max,
                           r.twist_residual_sup};
  std::string line;
  for (int k = 0; k < 16; ++k) {
    if (k) line += ',';
    line += format_g17(vals[k]);
  }
  return line;
}

void write_observables_csv(const std::string& path,
                           const std::vector<ObservableRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << kCsvHeader << "\n";
  for (const auto& r : rows) out << observables_csv_row(r) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

std::vector<ObservableRow> read_observables_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw IoError("unexpected CSV header in " + path);
  std::vector<ObservableRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double vals[16];
    std::string cell;
    for (int k = 0; k < 16; ++k) {
      if (!std::getline(ss, cell, ',')) throw IoError("short CSV row in " + path);
      vals[k] = std::stod(cell);
    }
    ObservableRow r;
    r.t = vals[0];
    r.dt = vals[1];
    r.area = vals[2];
    r.min_eta = vals[3];
    r.max_eta = vals[4];
    r.eta_bound = vals[5];
    r.sup_H2 = vals[6];
    r.int_H2 = vals[7];
    r.sup_A2 = vals[8];
    r.int_A2 = vals[9];
    r.lag_defect_sup = vals[10];
    r.lag_defect_l2 = vals[11];
    r.max_rho = vals[12];
    r.willmore = vals[13];
    r.sigma_ratio_max = vals[14];
    r.twist_residual_sup = vals[15];
    rows.push_back(r);
  }
  return rows;
}

double comparison_bound(double t, double eta0_min, int c) {
  if (!(eta0_min > 0.0) || eta0_min > 1.0)
    throw ArgumentError("eta0_min must lie in (0, 1]");
  if (c != 0 && c != 1) throw ArgumentError("curvature c must be 0 or 1");
  if (eta0_min == 1.0) return 1.0;
  if (c == 0) return eta0_min;
  const double alpha = eta0_min / std::sqrt(1.0 - eta0_min * eta0_min);
  const double a = alpha * std::exp(t);
  return a / std::sqrt(1.0 + a * a);
}

double comparison_bound_highprec(double t, double eta0_min, int c) {
  if (!(eta0_min > 0.0) || eta0_min > 1.0)
    throw ArgumentError("eta0_min must lie in (0, 1]");
  if (c != 0 && c != 1) throw ArgumentError("curvature c must be 0 or 1");
  if (eta0_min == 1.0) return 1.0;
  if (c == 0) return eta0_min;
  const long double e0 = static_cast<long double>(eta0_min);
  const long double inv_alpha2 = (1.0L - e0 * e0) / (e0 * e0);
  const long double val =
      1.0L / sqrtl(1.0L + inv_alpha2 * expl(-2.0L * static_cast<long double>(t)));
  return static_cast<double>(val);
}

double max_rho(const MapGrid& map) {
  double worst = 0;
  for (size_t p = 0; p < map.u.size(); ++p) {
    const double du = wrap_unit(map.u[p]);
    const double dv = wrap_unit(map.v[p]);
    worst = std::max(worst, du * du + dv * dv);
  }
  return std::sqrt(worst / 2.0);
}

double max_rho(const TwistProfile& profile) {
  double worst = 0;
  for (int i = 0; i < profile.m; ++i) {
    const double s = std::sin(profile.theta(i));
    const double c = std::cos(profile.theta(i));
    // great-circle distance between x and its twist image
    double cosd = s * s * std::cos(profile.h[i]) + c * c;
    cosd = std::min(1.0, std::max(-1.0, cosd));
    worst = std::max(worst, std::acos(cosd));
  }
  return worst / std::sqrt(2.0);
}

double willmore_from_integral(double int_h2, int chi) {
  return 0.5 * int_h2 - chi;
}

double willmore(const GeometryField& geom, int chi) {
  double sum = 0;
  for (size_t p = 0; p < geom.h2.size(); ++p) sum += geom.h2[p] * geom.dens[p];
  return 0.5 * sum * geom.h * geom.h - chi;
}

double gaussian_density(const MapGrid& map, const RescaleSpec& spec, double t) {
  if (!(t < spec.t0)) throw ArgumentError("density requires t < t0");
  const double tau = spec.t0 - t;
  const double norm = 1.0 / (4.0 * M_PI * tau);
  // exp(-r2/(4 tau)) < 1e-16  <=>  r2 > 4 tau * 16 ln 10
  const double r2_cut = 4.0 * tau * 16.0 * std::log(10.0);
  const double r_cut = std::sqrt(r2_cut);

  // A diagonal translate (m, m) moves the sheet by sqrt(2)|m|, so the window
  // of translates that can clear the kernel cutoff is bounded; centre the
  // window on the translate closest to y0.
  const int reach = static_cast<int>(std::ceil(r_cut / std::sqrt(2.0) + 2.0));

  const int n = map.n;
  const double cell = map.h() * map.h();
  const auto& y0 = spec.center;
  const size_t p00 = map.idx(0, 0);
  const int mi0 = static_cast<int>(std::lround(
      0.5 * ((y0[0] - map.x(0)) + (y0[2] - map.x(0) - map.u[p00]))));
  const int mj0 = static_cast<int>(std::lround(
      0.5 * ((y0[1] - map.y(0)) + (y0[3] - map.y(0) - map.v[p00]))));

  std::vector<double> row_sum(n, 0.0);
  parallel_rows(n, [&](int i) {
    double acc = 0;
    for (int j = 0; j < n; ++j) {
      const size_t p = map.idx(i, j);
      const TorusNodeGeometry g = torus_node_geometry(torus_jet_at(map, 2, i, j));
      const double base[4] = {map.x(i), map.y(j), map.x(i) + map.u[p],
                              map.y(j) + map.v[p]};
      for (int mi = mi0 - reach; mi <= mi0 + reach; ++mi) {
        for (int mj = mj0 - reach; mj <= mj0 + reach; ++mj) {
          const double d0 = base[0] + mi - y0[0];
          const double d1 = base[1] + mj - y0[1];
          const double d2 = base[2] + mi - y0[2];
          const double d3 = base[3] + mj - y0[3];
          const double r2 = d0 * d0 + d1 * d1 + d2 * d2 + d3 * d3;
          if (r2 > r2_cut) continue;
          acc += std::exp(-r2 / (4.0 * tau)) * g.dens;
        }
      }
    }
    row_sum[i] = acc;
  });

  double total = 0;
  for (int i = 0; i < n; ++i) total += row_sum[i];
  return norm * total * cell;
}

std::vector<std::pair<double, double>> density_trace(const SnapshotSeries& series,
                                                     const RescaleSpec& spec) {
  std::vector<std::pair<double, double>> trace;
  for (size_t k = 0; k < series.times.size(); ++k) {
    if (series.times[k] < spec.t0) {
      trace.emplace_back(series.times[k],
                         gaussian_density(series.maps[k], spec, series.times[k]));
    }
  }
  return trace;
}

std::vector<SpacetimePoint> parabolic_rescale(const std::vector<SpacetimePoint>& points,
                                              const RescaleSpec& spec) {
  if (!(spec.lambda > 0)) throw ArgumentError("rescale factor must be positive");
  std::vector<SpacetimePoint> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    SpacetimePoint q;
    for (int k = 0; k < 4; ++k) q.x[k] = spec.lambda * (p.x[k] - spec.center[k]);
    q.t = spec.lambda * spec.lambda * (p.t - spec.t0);
    out.push_back(q);
  }
  return out;
}

void write_point_set(const std::string& path, const std::vector<SpacetimePoint>& pts) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "# lagflow-points count=" << pts.size() << "\n";
  for (const auto& p : pts) {
    out << format_g17(p.x[0]) << " " << format_g17(p.x[1]) << " "
        << format_g17(p.x[2]) << " " << format_g17(p.x[3]) << " "
        << format_g17(p.t) << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<SpacetimePoint> read_point_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string header;
  std::getline(in, header);
  size_t count = 0;
  if (std::sscanf(header.c_str(), "# lagflow-points count=%zu", &count) != 1)
    throw IoError("bad point-set header in " + path);
  std::vector<SpacetimePoint> pts(count);
  for (size_t k = 0; k < count; ++k) {
    if (!(in >> pts[k].x[0] >> pts[k].x[1] >> pts[k].x[2] >> pts[k].x[3] >> pts[k].t))
      throw IoError("truncated point set: " + path);
  }
  return pts;
}

std::vector<SpacetimePoint> sample_surface(const MapGrid& map, double t) {
  std::vector<SpacetimePoint> pts;
  pts.reserve(map.u.size());
  for (int i = 0; i < map.n; ++i) {
    for (int j = 0; j < map.n; ++j) {
      const size_t p = map.idx(i, j);
      SpacetimePoint q;
      q.x = {map.x(i), map.y(j), map.x(i) + map.u[p], map.y(j) + map.v[p]};
      q.t = t;
      pts.push_back(q);
    }
  }
  return pts;
}

}  // namespace lagflow
