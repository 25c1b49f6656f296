#include <cmath>
#include <random>

#include "doctest.h"
#include "lagflow/errors.hpp"
#include "lagflow/geometry.hpp"
#include "oracles.hpp"
#include "test_maps.hpp"

using namespace lagflow;

TEST_CASE("identity graph: metric 2*Id, flat, eta = 1") {
  const MapGrid map = testmaps::identity(16);
  const GeometryField f = compute_geometry(map, 2);
  for (size_t p = 0; p < f.dens.size(); ++p) {
    CHECK(f.g11[p] == 2.0);
    CHECK(f.g12[p] == 0.0);
    CHECK(f.g22[p] == 2.0);
    CHECK(f.dens[p] == 2.0);
    CHECK(f.eta[p] == 1.0);
    CHECK(f.eta_hodge[p] == 1.0);
    CHECK(f.a2[p] == 0.0);
    CHECK(f.h2[p] == 0.0);
  }
  const DefectNorms defect = lagrangian_defect(f);
  CHECK(defect.sup == 0.0);
  CHECK(defect.l2 == 0.0);
}

TEST_CASE("linear jet Df = diag(2, 1/2): eta = 0.8, flat") {
  TorusJet jet{};
  jet.ux = 1.0;   // f^1 = 2x
  jet.vy = -0.5;  // f^2 = y/2
  const TorusNodeGeometry g = torus_node_geometry(jet);
  CHECK(g.eta == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(g.jac == doctest::Approx(1.0).epsilon(1e-15));
  for (int m = 0; m < 4; ++m) CHECK(std::abs(g.H[m]) <= 1e-15);
  CHECK(g.a2 <= 1e-15);
  // g^{ij} = diag(1/5, 4/5): the CFL eigenvalue of this map
  CHECK(g.gi_eig_max == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("integer-affine lattice maps are flat with the exact eta") {
  // the lattice stand-ins for linear maps: [[1,1],[0,1]] and [[2,1],[1,1]]
  struct Case {
    std::array<int, 4> m;
    double eta;
  };
  for (const auto& c : {Case{{1, 1, 0, 1}, 2.0 / std::sqrt(5.0)},
                        Case{{2, 1, 1, 1}, 2.0 / 3.0}}) {
    const MapGrid map = testmaps::integer_affine(32, c.m[0], c.m[1], c.m[2], c.m[3]);
    const GeometryField f = compute_geometry(map, 2);
    for (size_t p = 0; p < f.eta.size(); ++p) {
      CHECK(f.eta[p] == doctest::Approx(c.eta).epsilon(1e-14));
      CHECK(f.h2[p] <= 1e-24);
      CHECK(f.a2[p] <= 1e-24);
      CHECK(std::abs(f.defect[p]) <= 1e-13);
    }
  }
}

TEST_CASE("shear slope a gives eta = 2/sqrt(4 + a^2)") {
  TorusJet jet{};
  jet.uy = 1.0;
  CHECK(torus_node_geometry(jet).eta ==
        doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-15));
  jet.uy = 0.37;
  CHECK(torus_node_geometry(jet).eta ==
        doctest::Approx(2.0 / std::sqrt(4.0 + 0.37 * 0.37)).epsilon(1e-15));
}

TEST_CASE("eta field of a shear matches the closed form and the Hodge route") {
  const int n = 64;
  const double a = 0.2;
  const MapGrid map = testmaps::shear(n, a);
  const GeometryField f = compute_geometry(map, 2);
  const std::vector<double> eta = eta_field(f);
  for (int j = 0; j < n; ++j) {
    const TorusJet jet = torus_jet_at(map, 2, 0, j);
    const double expected = 2.0 / std::sqrt(4.0 + jet.uy * jet.uy);
    CHECK(eta[f.idx(0, j)] == doctest::Approx(expected).epsilon(1e-14));
  }
  // discrete Jacobian of a shear is exactly 1, so the two eta routes agree
  CHECK(f.eta_cross_gap() <= 1e-14);
}

TEST_CASE("Lagrangian defect norms") {
  SUBCASE("shear: zero to roundoff at any order") {
    for (int order : {2, 4}) {
      const DefectNorms d =
          lagrangian_defect(compute_geometry(testmaps::shear(64, 0.2), order));
      CHECK(d.sup <= 1e-12);
      CHECK(d.l2 <= 1e-12);
    }
  }
  SUBCASE("non-area-preserving wave: sup defect about 0.2 pi") {
    const DefectNorms d =
        lagrangian_defect(compute_geometry(testmaps::x_wave(64, 0.1), 2));
    CHECK(d.sup == doctest::Approx(0.2 * M_PI).epsilon(0.01));
  }
}

TEST_CASE("shear geometry matches the closed-form oracle at y = 1/4") {
  const oracles::ShearOracle oracle{0.1, 1};
  // frozen values at y = 1/4: w = 0, z = -0.4 pi^2, det = 4
  //   |A|^2 = |H|^2 = 0.02 pi^4,  H = (2z/16)(-2, 0, 2, 0)
  const double a2_expected = 1.9481818206800486;
  const double h0_expected = 0.98696044010893586;
  CHECK(oracle.a2(0.25) == doctest::Approx(a2_expected).epsilon(1e-15));
  CHECK(oracle.H(0.25)[0] == doctest::Approx(h0_expected).epsilon(1e-15));

  for (int order : {2, 4}) {
    const int n = 64;
    const MapGrid map = testmaps::shear(n, 0.1);
    const TorusNodeGeometry g = geometry_at(map, order, 3, n / 4);
    const double tol = order == 2 ? 1e-2 : 1e-4;
    CHECK(std::abs(g.a2 - a2_expected) <= tol);
    CHECK(std::abs(g.h2 - a2_expected) <= tol);
    CHECK(std::abs(g.H[0] - h0_expected) <= tol);
    CHECK(std::abs(g.H[1]) <= tol);
    CHECK(std::abs(g.H[2] + h0_expected) <= tol);
    CHECK(std::abs(g.H[3]) <= tol);
    CHECK(g.eta == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("pointwise |A|^2 converges to the oracle at the stencil order") {
  const oracles::ShearOracle oracle{0.1, 1};
  const double exact = oracle.a2(0.25);
  auto error_at = [&](int n, int order) {
    const TorusNodeGeometry g = geometry_at(testmaps::shear(n, 0.1), order, 0, n / 4);
    return std::abs(g.a2 - exact);
  };
  SUBCASE("order 2") {
    CHECK(error_at(32, 2) / error_at(64, 2) == doctest::Approx(4.0).epsilon(0.2));
  }
  SUBCASE("order 4") {
    CHECK(error_at(16, 4) / error_at(32, 4) == doctest::Approx(16.0).epsilon(0.25));
  }
}

TEST_CASE("|H|^2 <= 2 |A|^2 pointwise") {
  MapGrid map(32);
  for (int i = 0; i < 32; ++i) {
    for (int j = 0; j < 32; ++j) {
      map.u[map.idx(i, j)] = 0.08 * std::sin(2.0 * M_PI * map.y(j)) +
                             0.02 * std::sin(2.0 * M_PI * map.x(i));
      map.v[map.idx(i, j)] = 0.03 * std::sin(2.0 * M_PI * map.x(i));
    }
  }
  const GeometryField f = compute_geometry(map, 2);
  for (size_t p = 0; p < f.h2.size(); ++p)
    CHECK(f.h2[p] <= 2.0 * f.a2[p] + 1e-12);
}

TEST_CASE("B and sigma vanish on totally geodesic graphs") {
  for (const MapGrid& map :
       {testmaps::identity(16), testmaps::translation(16, 0.13, -0.27),
        testmaps::integer_affine(16, 2, 1, 1, 1)}) {
    const GeometryField f = compute_geometry(map, 2);
    for (double b : f.B) CHECK(std::abs(b) <= 1e-12);
    for (double s : f.sigma) CHECK(std::abs(s) <= 1e-12);
  }
}

TEST_CASE("synthetic second fundamental form maps to a single B entry") {
  // At the identity frame, v_xx = -2 makes A(e1, e1) = (sqrt2/2) J'e1, so the
  // only nonzero entry is B[0][0][0] = -sqrt2/2.
  TorusJet jet{};
  jet.vxx = -2.0;
  const TorusNodeGeometry g = torus_node_geometry(jet);
  CHECK(g.B[0][0][0] == doctest::Approx(-std::sqrt(2.0) / 2.0).epsilon(1e-14));
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        if (!(k == 0 && i == 0 && j == 0)) CHECK(std::abs(g.B[k][i][j]) <= 1e-14);
}

TEST_CASE("B is numerically symmetric on exactly area-preserving maps") {
  const MapGrid map = testmaps::shear(64, 0.2);
  const GeometryField f = compute_geometry(map, 2);
  double worst = 0;
  for (int i = 0; i < f.n; ++i)
    for (int j = 0; j < f.n; ++j)
      worst = std::max(worst, b_identities(b_tensor_at(f, i, j)).asymmetry);
  CHECK(worst <= 1e-12);
}

TEST_CASE("b_identities: pinned cases") {
  SUBCASE("single diagonal entry") {
    BTensor b{};
    b.v[0][0][0] = 1.0;
    const BIdentity r = b_identities(b);
    CHECK(r.b2 == 1.0);
    CHECK(r.sigma2 == 1.0);
    CHECK(r.lhs == 1.0);
    CHECK(r.rhs == 1.0);
  }
  SUBCASE("equality family B122 = B111/3") {
    BTensor b{};
    b.v[0][0][0] = 1.0;
    b.v[0][1][1] = b.v[1][0][1] = b.v[1][1][0] = 1.0 / 3.0;
    const BIdentity r = b_identities(b);
    CHECK(r.b2 == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(r.sigma2 == doctest::Approx(16.0 / 9.0).epsilon(1e-15));
    CHECK(r.ratio == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-14));
    CHECK(r.symmetric);
  }
  SUBCASE("asymmetric input is flagged") {
    BTensor b{};
    b.v[0][0][1] = 1.0;  // b.v[0][1][0] left at zero
    CHECK_FALSE(b_identities(b).symmetric);
  }
}

TEST_CASE("b_identities: random symmetric tensors against brute force") {
  std::mt19937 rng(20240811);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double c111 = dist(rng), c112 = dist(rng), c122 = dist(rng),
                 c222 = dist(rng);
    BTensor b{};
    b.v[0][0][0] = c111;
    b.v[0][0][1] = b.v[0][1][0] = b.v[1][0][0] = c112;
    b.v[0][1][1] = b.v[1][0][1] = b.v[1][1][0] = c122;
    b.v[1][1][1] = c222;
    const BIdentity r = b_identities(b);
    const oracles::BruteForceB bf = oracles::brute_force_b(b);
    CHECK(r.symmetric);
    CHECK(std::abs(r.lhs - r.rhs) <= 1e-12 * (1.0 + r.b2));
    CHECK(std::abs(r.lhs - bf.lhs) <= 1e-12 * (1.0 + r.b2));
    CHECK(std::abs(r.rhs - bf.rhs) <= 1e-12 * (1.0 + r.b2));
    CHECK(r.sigma2 <= (4.0 / 3.0) * r.b2 + 1e-12);
  }
}

TEST_CASE("degenerate inputs raise typed errors") {
  CHECK_THROWS_AS(compute_geometry(MapGrid(4), 2), ArgumentError);
  CHECK_THROWS_AS(compute_geometry(testmaps::identity(16), 3), ArgumentError);
  MapGrid bad = testmaps::identity(16);
  bad.u[5] = std::nan("");
  CHECK_THROWS_AS(compute_geometry(bad, 2), NumericError);
}
