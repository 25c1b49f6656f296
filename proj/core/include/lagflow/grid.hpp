#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace lagflow {

/// Shortest representative of d modulo 1, in [-0.5, 0.5] (ties to even).
/// Neighbour differences of displacement fields are reduced through this so
/// that maps whose lift jumps by whole periods across the seam (integer-matrix
/// affine test maps) differentiate cleanly; for resolved smooth fields the
/// reduction is the identity.
inline double wrap_unit(double d) { return d - std::nearbyint(d); }

/// Periodic displacement field on the unit square: the map is
/// f(x, y) = (x + u, y + v) mod 1 sampled at nodes x_i = i/n, y_j = j/n.
/// Storage is row-major with i (the x index) outermost.
struct MapGrid {
  int n = 0;
  std::vector<double> u;
  std::vector<double> v;

  MapGrid() = default;
  explicit MapGrid(int n_) : n(n_), u(static_cast<size_t>(n_) * n_, 0.0),
                             v(static_cast<size_t>(n_) * n_, 0.0) {}

  double h() const { return 1.0 / n; }
  size_t idx(int i, int j) const { return static_cast<size_t>(i) * n + j; }
  double x(int i) const { return i * h(); }
  double y(int j) const { return j * h(); }

  bool finite() const;
};

/// Equivariant sphere map (theta, phi) -> (theta, phi + h(theta)) sampled at
/// cell-centred colatitudes theta_i = (i + 1/2) pi / m.  Exactly
/// area-preserving for every profile; the pole cells never place a node at
/// theta = 0 or pi.
struct TwistProfile {
  int m = 0;
  std::vector<double> h;

  TwistProfile() = default;
  explicit TwistProfile(int m_) : m(m_), h(m_, 0.0) {}

  double dtheta() const { return M_PI / m; }
  double theta(int i) const { return (i + 0.5) * M_PI / m; }

  bool finite() const;
};

// Snapshot files are plain text with 17 significant digits so that doubles
// round-trip exactly.
//   map:   "# lagflow-map n=<N>"  then N^2 rows "i j u v" in row-major order
//   twist: "# lagflow-twist m=<M>" then M rows "i theta h"
void write_map_snapshot(const std::string& path, const MapGrid& map);
MapGrid read_map_snapshot(const std::string& path);

void write_twist_snapshot(const std::string& path, const TwistProfile& profile);
TwistProfile read_twist_snapshot(const std::string& path);

/// Peeks at the header line: "map", "twist", or throws IoError.
std::string snapshot_kind(const std::string& path);

/// printf "%.17g" — shared by every text emitter so output is reproducible.
std::string format_g17(double value);

}  // namespace lagflow
