#include <array>
#include <cmath>

#include "doctest.h"
#include "lagflow/stencils.hpp"
#include "test_maps.hpp"

using namespace lagflow;

TEST_CASE("wrap_unit reduces to the shortest representative") {
  CHECK(wrap_unit(0.3) == doctest::Approx(0.3));
  CHECK(wrap_unit(0.8) == doctest::Approx(-0.2));
  CHECK(wrap_unit(-0.7) == doctest::Approx(0.3));
  CHECK(wrap_unit(2.25) == doctest::Approx(0.25));
  CHECK(wrap_unit(0.0) == 0.0);
}

TEST_CASE("derivatives of integer-affine displacement fields are exact") {
  const int n = 32;
  // Dehn twist [[1,1],[0,1]] and the unit-determinant map [[2,1],[1,1]]
  for (auto mat : {std::array<int, 4>{1, 1, 0, 1}, std::array<int, 4>{2, 1, 1, 1}}) {
    const MapGrid map = testmaps::integer_affine(n, mat[0], mat[1], mat[2], mat[3]);
    for (int order : {2, 4}) {
      for (int i : {0, 1, n - 1, n / 2}) {
        for (int j : {0, 1, n - 1, n / 3}) {
          const TorusJet jet = torus_jet_at(map, order, i, j);
          CHECK(jet.ux == doctest::Approx(mat[0] - 1.0).epsilon(1e-14));
          CHECK(jet.uy == doctest::Approx(mat[1]).epsilon(1e-14));
          CHECK(jet.vx == doctest::Approx(mat[2]).epsilon(1e-14));
          CHECK(jet.vy == doctest::Approx(mat[3] - 1.0).epsilon(1e-14));
          CHECK(std::abs(jet.uxx) <= 1e-12);
          CHECK(std::abs(jet.uxy) <= 1e-12);
          CHECK(std::abs(jet.uyy) <= 1e-12);
          CHECK(std::abs(jet.vxx) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("stencils converge at their nominal order on a smooth field") {
  const double a = 0.1;
  auto worst_uy_error = [&](int n, int order) {
    const MapGrid map = testmaps::shear(n, a);
    double worst = 0;
    for (int j = 0; j < n; ++j) {
      const TorusJet jet = torus_jet_at(map, order, 0, j);
      const double exact = 2.0 * M_PI * a * std::cos(2.0 * M_PI * map.y(j));
      worst = std::max(worst, std::abs(jet.uy - exact));
    }
    return worst;
  };

  SUBCASE("order 2") {
    const double e32 = worst_uy_error(32, 2);
    const double e64 = worst_uy_error(64, 2);
    CHECK(e32 / e64 == doctest::Approx(4.0).epsilon(0.15));
  }
  SUBCASE("order 4") {
    const double e32 = worst_uy_error(32, 4);
    const double e64 = worst_uy_error(64, 4);
    CHECK(e32 / e64 == doctest::Approx(16.0).epsilon(0.2));
  }
}

TEST_CASE("second and cross derivatives match analytic values") {
  const int n = 64;
  MapGrid map(n);
  // u = 0.05 sin(2 pi x) cos(2 pi y): all jet entries analytic
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      map.u[map.idx(i, j)] = 0.05 * std::sin(2.0 * M_PI * map.x(i)) *
                             std::cos(2.0 * M_PI * map.y(j));
  const double w = 2.0 * M_PI;
  const int i = 5, j = 11;
  const double x = map.x(i), y = map.y(j);
  const double uxy_exact = -0.05 * w * w * std::cos(w * x) * std::sin(w * y);
  const double uxx_exact = -0.05 * w * w * std::sin(w * x) * std::cos(w * y);

  const TorusJet j2 = torus_jet_at(map, 2, i, j);
  CHECK(std::abs(j2.uxy - uxy_exact) <= 5e-3);
  CHECK(std::abs(j2.uxx - uxx_exact) <= 5e-3);

  const TorusJet j4 = torus_jet_at(map, 4, i, j);
  CHECK(std::abs(j4.uxy - uxy_exact) <= 2e-5);
  CHECK(std::abs(j4.uxx - uxx_exact) <= 5e-6);
}
