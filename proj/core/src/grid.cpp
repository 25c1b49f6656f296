#include "lagflow/grid.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lagflow/errors.hpp"

namespace lagflow {

bool MapGrid::finite() const {
  for (double x : u)
    if (!std::isfinite(x)) return false;
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool TwistProfile::finite() const {
  for (double x : h)
    if (!std::isfinite(x)) return false;
  return true;
}

std::string format_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_map_snapshot(const std::string& path, const MapGrid& map) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "# lagflow-map n=" << map.n << "\n";
  for (int i = 0; i < map.n; ++i) {
    for (int j = 0; j < map.n; ++j) {
      out << i << " " << j << " " << format_g17(map.u[map.idx(i, j)]) << " "
          << format_g17(map.v[map.idx(i, j)]) << "\n";
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

MapGrid read_map_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string header;
  std::getline(in, header);
  int n = 0;
  if (std::sscanf(header.c_str(), "# lagflow-map n=%d", &n) != 1 || n < 1) {
    throw IoError("bad map snapshot header in " + path);
  }
  MapGrid map(n);
  int i, j;
  double u, v;
  for (long k = 0; k < static_cast<long>(n) * n; ++k) {
    if (!(in >> i >> j >> u >> v)) throw IoError("truncated map snapshot: " + path);
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw IoError("node index out of range in " + path);
    map.u[map.idx(i, j)] = u;
    map.v[map.idx(i, j)] = v;
  }
  return map;
}

void write_twist_snapshot(const std::string& path, const TwistProfile& profile) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "# lagflow-twist m=" << profile.m << "\n";
  for (int i = 0; i < profile.m; ++i) {
    out << i << " " << format_g17(profile.theta(i)) << " "
        << format_g17(profile.h[i]) << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

TwistProfile read_twist_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string header;
  std::getline(in, header);
  int m = 0;
  if (std::sscanf(header.c_str(), "# lagflow-twist m=%d", &m) != 1 || m < 1) {
    throw IoError("bad twist snapshot header in " + path);
  }
  TwistProfile profile(m);
  int i;
  double theta, h;
  for (int k = 0; k < m; ++k) {
    if (!(in >> i >> theta >> h)) throw IoError("truncated twist snapshot: " + path);
    if (i < 0 || i >= m) throw IoError("node index out of range in " + path);
    profile.h[i] = h;
  }
  return profile;
}

std::string snapshot_kind(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string header;
  std::getline(in, header);
  if (header.rfind("# lagflow-map", 0) == 0) return "map";
  if (header.rfind("# lagflow-twist", 0) == 0) return "twist";
  throw IoError("unrecognized snapshot header in " + path);
}

}  // namespace lagflow
