#pragma once

#include <string>
#include <vector>

#include "lagflow/grid.hpp"

namespace lagflow {

/// Construction recipe for an initial map.  Shears and double shears are
/// area preserving in closed form; the hamiltonian kind integrates the
/// divergence-free field grad^perp psi with the implicit midpoint rule (a
/// symplectic map up to the solver tolerance); compose resamples children
/// with periodic bicubic interpolation and reports the defect it introduces.
struct GeneratorSpec {
  enum class Kind { Shear, DoubleShear, Hamiltonian, SphereTwist, Compose };

  struct PsiMode {
    int kx = 1;
    int ky = 1;
    // basis: 0 = cos*cos, 1 = cos*sin, 2 = sin*cos, 3 = sin*sin
    int basis = 0;
    double amp = 0;
  };

  struct TwistMode {
    double amp = 0;
    int k = 1;  // contributes amp * cos(k theta)
  };

  Kind kind = Kind::Shear;
  double amplitude = 0.0;  // torus units (shear) or radians (sphere twist)
  int wavenumber = 1;
  double amplitude2 = 0.0;  // second stage of a double shear
  int wavenumber2 = 1;
  std::vector<PsiMode> psi;
  int substeps = 64;
  std::vector<TwistMode> twist_modes;  // overrides amplitude*(1-cos theta)
  std::vector<GeneratorSpec> children;

  bool is_sphere() const { return kind == Kind::SphereTwist; }
};

void validate_generator_spec(const GeneratorSpec& spec);

struct GeneratorReport {
  double jacobian_min = 0;
  double defect_sup = 0;
  double defect_l2 = 0;
  double min_eta = 0;
  bool is_diffeo = false;
  double defect_bound = 0;  // generator's own bound on its discrete defect
};

std::string report_text(const GeneratorReport& report);

MapGrid generate_torus(const GeneratorSpec& spec, int n);
TwistProfile generate_sphere(const GeneratorSpec& spec, int m);

/// Validity report with order-4 stencils (jacobian, defect norms, min eta).
GeneratorReport validate(const MapGrid& map);
GeneratorReport validate(const TwistProfile& profile);

struct GeneratedMap {
  MapGrid map;
  GeneratorReport report;
};
GeneratedMap generate_torus_validated(const GeneratorSpec& spec, int n);

/// Periodic Catmull-Rom interpolation of a grid field at (x, y) in units of
/// the period.  Used by compose; exposed for tests.
double bicubic_periodic(const std::vector<double>& field, int n, double x, double y);

}  // namespace lagflow
