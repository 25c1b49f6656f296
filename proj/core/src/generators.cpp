#include "lagflow/generators.hpp"

#include <cmath>
#include <sstream>

#include "lagflow/errors.hpp"
#include "lagflow/geometry.hpp"
#include "lagflow/parallel.hpp"

namespace lagflow {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kMidpointTol = 1e-13;
}  // namespace

void validate_generator_spec(const GeneratorSpec& spec) {
  using Kind = GeneratorSpec::Kind;
  if (!std::isfinite(spec.amplitude) || !std::isfinite(spec.amplitude2))
    throw ConfigError("generator amplitude must be finite");
  switch (spec.kind) {
    case Kind::Shear:
      if (spec.wavenumber < 1) throw ConfigError("shear wavenumber must be >= 1");
      break;
    case Kind::DoubleShear:
      if (spec.wavenumber < 1 || spec.wavenumber2 < 1)
        throw ConfigError("double_shear wavenumbers must be >= 1");
      break;
    case Kind::Hamiltonian:
      if (spec.substeps < 16) throw ConfigError("hamiltonian needs substeps >= 16");
      if (spec.psi.empty()) throw ConfigError("hamiltonian needs a stream-function table");
      for (const auto& mode : spec.psi) {
        if (mode.kx < 0 || mode.ky < 0 || mode.basis < 0 || mode.basis > 3 ||
            !std::isfinite(mode.amp))
          throw ConfigError("bad stream-function mode");
      }
      break;
    case Kind::SphereTwist:
      for (const auto& mode : spec.twist_modes) {
        if (mode.k < 0 || !std::isfinite(mode.amp))
          throw ConfigError("bad twist mode");
      }
      break;
    case Kind::Compose:
      if (spec.children.size() < 2)
        throw ConfigError("compose needs at least two children");
      for (const auto& child : spec.children) {
        if (child.kind == Kind::SphereTwist || child.kind == Kind::Compose)
          throw ConfigError("compose children must be flat torus generators");
        validate_generator_spec(child);
      }
      break;
  }
}

namespace {

struct Psi {
  const std::vector<GeneratorSpec::PsiMode>* modes;

  // grad^perp psi = (-psi_y, psi_x)
  void field(double x, double y, double& fx, double& fy) const {
    fx = 0;
    fy = 0;
    for (const auto& m : *modes) {
      const double ax = kTwoPi * m.kx, ay = kTwoPi * m.ky;
      double bx, by, dbx, dby;
      if (m.basis == 0 || m.basis == 1) {
        bx = std::cos(ax * x);
        dbx = -ax * std::sin(ax * x);
      } else {
        bx = std::sin(ax * x);
        dbx = ax * std::cos(ax * x);
      }
      if (m.basis == 0 || m.basis == 2) {
        by = std::cos(ay * y);
        dby = -ay * std::sin(ay * y);
      } else {
        by = std::sin(ay * y);
        dby = ay * std::cos(ay * y);
      }
      fx += -m.amp * bx * dby;
      fy += m.amp * dbx * by;
    }
  }
};

// Implicit midpoint step of dz/dt = X(z); contraction iteration to 1e-13.
void midpoint_step(const Psi& psi, double tau, double& x, double& y) {
  double nx = x, ny = y;
  double fx, fy;
  psi.field(x, y, fx, fy);
  nx = x + tau * fx;
  ny = y + tau * fy;
  for (int it = 0; it < 200; ++it) {
    psi.field(0.5 * (x + nx), 0.5 * (y + ny), fx, fy);
    const double tx = x + tau * fx;
    const double ty = y + tau * fy;
    const double delta = std::abs(tx - nx) + std::abs(ty - ny);
    nx = tx;
    ny = ty;
    if (delta < kMidpointTol) {
      x = nx;
      y = ny;
      return;
    }
  }
  throw GeneratorError("implicit midpoint iteration did not converge");
}

MapGrid make_shear(double a, int k, int n) {
  MapGrid map(n);
  for (int j = 0; j < n; ++j) {
    const double uy = a * std::sin(kTwoPi * k * map.y(j));
    for (int i = 0; i < n; ++i) map.u[map.idx(i, j)] = uy;
  }
  return map;
}

// x-shear followed by a y-shear, composed in closed form:
//   (x, y) -> (x + a1 sin(2 pi k1 y), y) -> (x', y + a2 sin(2 pi k2 x')).
MapGrid make_double_shear(const GeneratorSpec& spec, int n) {
  MapGrid map(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = spec.amplitude * std::sin(kTwoPi * spec.wavenumber * map.y(j));
      const double xp = map.x(i) + u;
      map.u[map.idx(i, j)] = u;
      map.v[map.idx(i, j)] = spec.amplitude2 * std::sin(kTwoPi * spec.wavenumber2 * xp);
    }
  }
  return map;
}

MapGrid make_hamiltonian(const GeneratorSpec& spec, int n) {
  MapGrid map(n);
  const Psi psi{&spec.psi};
  const double tau = 1.0 / spec.substeps;
  parallel_rows(n, [&](int i) {
    for (int j = 0; j < n; ++j) {
      double x = map.x(i), y = map.y(j);
      for (int s = 0; s < spec.substeps; ++s) midpoint_step(psi, tau, x, y);
      map.u[map.idx(i, j)] = x - map.x(i);
      map.v[map.idx(i, j)] = y - map.y(j);
    }
  });
  return map;
}

MapGrid make_composed(const GeneratorSpec& spec, int n) {
  MapGrid acc = generate_torus(spec.children.front(), n);
  for (size_t c = 1; c < spec.children.size(); ++c) {
    const MapGrid next = generate_torus(spec.children[c], n);
    MapGrid out(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const size_t p = acc.idx(i, j);
        const double fx = acc.x(i) + acc.u[p];
        const double fy = acc.y(j) + acc.v[p];
        out.u[p] = acc.u[p] + bicubic_periodic(next.u, n, fx, fy);
        out.v[p] = acc.v[p] + bicubic_periodic(next.v, n, fx, fy);
      }
    }
    acc = std::move(out);
  }
  return acc;
}

}  // namespace

double bicubic_periodic(const std::vector<double>& field, int n, double x, double y) {
  // Catmull-Rom weights in each axis on the 4-point periodic neighbourhood.
  auto weights = [](double t, double w[4]) {
    const double t2 = t * t, t3 = t2 * t;
    w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
    w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
    w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
    w[3] = 0.5 * (t3 - t2);
  };
  const double gx = (x - std::floor(x)) * n;
  const double gy = (y - std::floor(y)) * n;
  int i0 = static_cast<int>(gx);
  int j0 = static_cast<int>(gy);
  if (i0 >= n) i0 = n - 1;  // guards x == 1.0 after floating roundoff
  if (j0 >= n) j0 = n - 1;
  double wx[4], wy[4];
  weights(gx - i0, wx);
  weights(gy - j0, wy);
  double value = 0;
  for (int a = -1; a <= 2; ++a) {
    const int ia = wrap_index(i0 + a < 0 ? i0 + a + n : i0 + a, n);
    double rowval = 0;
    for (int b = -1; b <= 2; ++b) {
      const int jb = wrap_index(j0 + b < 0 ? j0 + b + n : j0 + b, n);
      rowval += wy[b + 1] * field[static_cast<size_t>(ia) * n + jb];
    }
    value += wx[a + 1] * rowval;
  }
  return value;
}

MapGrid generate_torus(const GeneratorSpec& spec, int n) {
  validate_generator_spec(spec);
  if (spec.is_sphere()) throw ConfigError("sphere_twist spec used for a torus map");
  if (n < 8) throw ConfigError("grid resolution must be >= 8");
  using Kind = GeneratorSpec::Kind;
  switch (spec.kind) {
    case Kind::Shear:
      return make_shear(spec.amplitude, spec.wavenumber, n);
    case Kind::DoubleShear:
      return make_double_shear(spec, n);
    case Kind::Hamiltonian:
      return make_hamiltonian(spec, n);
    case Kind::Compose: {
      MapGrid map = make_composed(spec, n);
      const GeneratorReport report = validate(map);
      if (!report.is_diffeo)
        throw GeneratorError("composed map lost Jacobian positivity");
      return map;
    }
    case Kind::SphereTwist:
      break;
  }
  throw ConfigError("unsupported torus generator kind");
}

TwistProfile generate_sphere(const GeneratorSpec& spec, int m) {
  validate_generator_spec(spec);
  if (!spec.is_sphere()) throw ConfigError("torus spec used for a sphere profile");
  if (m < 32) throw ConfigError("twist profile needs m >= 32 nodes");
  TwistProfile profile(m);
  for (int i = 0; i < m; ++i) {
    const double theta = profile.theta(i);
    if (spec.twist_modes.empty()) {
      profile.h[i] = spec.amplitude * (1.0 - std::cos(theta));
    } else {
      double value = 0;
      for (const auto& mode : spec.twist_modes)
        value += mode.amp * std::cos(mode.k * theta);
      profile.h[i] = value;
    }
  }
  return profile;
}

GeneratorReport validate(const MapGrid& map) {
  const GeometryReduction r = reduce_geometry(map, 4);
  GeneratorReport report;
  report.jacobian_min = r.min_jac;
  report.defect_sup = r.defect_sup;
  report.defect_l2 = r.defect_l2;
  report.min_eta = r.min_eta;
  report.is_diffeo = r.min_jac > 0.0;
  report.defect_bound = r.defect_sup;
  return report;
}

GeneratorReport validate(const TwistProfile& profile) {
  GeneratorReport report;
  report.jacobian_min = 1.0;  // twist maps preserve the area form identically
  report.defect_sup = 0.0;
  report.defect_l2 = 0.0;
  report.is_diffeo = profile.finite();
  double min_eta = 1.0;
  for (int i = 0; i < profile.m; ++i) {
    const double s = std::sin(profile.theta(i));
    const double hm = i > 0 ? profile.h[i - 1] : profile.h[0];
    const double hp = i < profile.m - 1 ? profile.h[i + 1] : profile.h[profile.m - 1];
    const double hprime = (hp - hm) / (2.0 * profile.dtheta());
    min_eta = std::min(min_eta, 2.0 / std::sqrt(4.0 + hprime * hprime * s * s));
  }
  report.min_eta = min_eta;
  report.defect_bound = 0.0;
  return report;
}

GeneratedMap generate_torus_validated(const GeneratorSpec& spec, int n) {
  GeneratedMap out{generate_torus(spec, n), {}};
  out.report = validate(out.map);
  if (spec.kind == GeneratorSpec::Kind::Hamiltonian) {
    // symplectic integration keeps the analytic defect at solver tolerance;
    // what validate() measures is finite-difference error on top of that
    out.report.defect_bound =
        std::max(out.report.defect_sup, kMidpointTol * spec.substeps);
  }
  return out;
}

std::string report_text(const GeneratorReport& report) {
  std::ostringstream out;
  out << "jacobian_min " << format_g17(report.jacobian_min) << "\n"
      << "defect_sup " << format_g17(report.defect_sup) << "\n"
      << "defect_l2 " << format_g17(report.defect_l2) << "\n"
      << "min_eta " << format_g17(report.min_eta) << "\n"
      << "is_diffeo " << (report.is_diffeo ? "true" : "false") << "\n"
      << "defect_bound " << format_g17(report.defect_bound) << "\n";
  return out.str();
}

}  // namespace lagflow
