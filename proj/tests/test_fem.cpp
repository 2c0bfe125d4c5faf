#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cohere/fem.hpp"
#include "cohere/problem.hpp"
#include "oracles.hpp"

using namespace cohere;

TEST_CASE("p1 space construction") {
  CHECK_THROWS_AS(P1Space(cartesian_mesh(2, 2)), std::invalid_argument);

  P1Space s1(uniform_interval_mesh(4));
  CHECK(s1.num_nodes() == 5);
  CHECK(s1.boundary_node(0));
  CHECK(s1.boundary_node(4));
  CHECK_FALSE(s1.boundary_node(2));
  CHECK(s1.shape_grad(0, 0)[0] == doctest::Approx(-4.0));
  CHECK(s1.shape_grad(0, 1)[0] == doctest::Approx(4.0));

  P1Space s2(triangle_mesh(2));
  int boundary = 0;
  for (int v = 0; v < s2.num_nodes(); ++v)
    if (s2.boundary_node(v)) ++boundary;
  CHECK(boundary == 8);  // the 3x3 vertex grid minus the single interior node

  // hat-function gradients sum to zero on every cell
  for (int k = 0; k < s2.mesh().num_cells(); ++k) {
    Vec s(2);
    for (int a = 0; a < 3; ++a) s += s2.shape_grad(k, a);
    CHECK(s.norm() < 1e-13);
  }
}

TEST_CASE("weak residual hand values on two intervals") {
  // f = 1, u = (0, u1, 0) on [0,1] with h = 1/2: residual_1 = 4 u1 - 1/2
  ManufacturedCase mc = manufactured_case("quad1d");
  LagrangianFn L = poisson_lagrangian(mc.f, mc.alpha);
  P1Space space(uniform_interval_mesh(2));
  for (double u1 : {0.0, 0.125, -0.7, 2.0}) {
    std::vector<double> r = fem_weak_residual(L, space, {0.0, u1, 0.0});
    CHECK(r[0] == 0.0);
    CHECK(r[2] == 0.0);
    CHECK(r[1] == doctest::Approx(4.0 * u1 - 0.5).epsilon(1e-14));
  }
}

TEST_CASE("fem coherence identity on random states") {
  std::mt19937_64 rng(17);
  auto run = [&](PolyMesh mesh, const char* case_name) {
    ManufacturedCase mc = manufactured_case(case_name);
    LagrangianFn L = poisson_lagrangian(mc.f, mc.alpha);
    P1Space space(std::move(mesh));
    DiscreteFunctional F = fem_lagrangian(L, space);
    auto residual = [&](const std::vector<double>& x) {
      return fem_weak_residual(L, space, x);
    };
    std::vector<double> mass(space.num_nodes(), 1.0);
    CoherenceReport rep =
        coherence_check(F, residual, mass, 10, 5, 1e-12, "fem", case_name);
    CHECK(rep.pass);
    // the gradient itself is honest: matches finite differences of eval
    for (int t = 0; t < 5; ++t) {
      DOFVector u{SpaceTag::FemNodal, oracle::random_vector(space.num_nodes(), rng)};
      DOFVector v{SpaceTag::FemNodal, oracle::random_vector(space.num_nodes(), rng)};
      CHECK(gateaux_fd_check(F, u, v) < 1e-7);
    }
  };
  for (int n : {2, 8, 32}) run(uniform_interval_mesh(n), "sin1d");
  for (int n : {1, 2, 4}) run(triangle_mesh(n), "sinsin2d");
}

TEST_CASE("quad1d hand oracle: N = 2") {
  ManufacturedCase mc = manufactured_case("quad1d");
  LagrangianFn L = poisson_lagrangian(mc.f, mc.alpha);
  P1Space space(uniform_interval_mesh(2));
  std::vector<double> u = fem_solve(L, space);
  CHECK(u[1] == doctest::Approx(0.125).epsilon(1e-12));

  // direct solve agrees with the variational extremal
  DiscreteFunctional F = fem_lagrangian(L, space);
  DOFVector ue = find_extremal(F, {SpaceTag::FemNodal, std::vector<double>(3, 0.0)}, 1e-12);
  CHECK(ue.x[1] == doctest::Approx(u[1]).epsilon(1e-10));
}

TEST_CASE("assembled system matches the oracle on a small mesh") {
  ManufacturedCase mc = manufactured_case("sinsin2d");
  P1Space space(triangle_mesh(2));
  std::vector<std::size_t> free_nodes;
  SparseMatrix A = fem_assemble_poisson(mc.alpha, space, free_nodes);
  CHECK(free_nodes.size() == 1);
  // single interior node of the 2x2 criss-cross: diagonal entry 4
  CHECK(A.to_dense()[0][0] == doctest::Approx(4.0));
  CHECK(A.max_asymmetry() == doctest::Approx(0.0));
}

TEST_CASE("refined load quadrature is nodally exact for quad1d") {
  ManufacturedCase mc = manufactured_case("quad1d");
  LagrangianFn L = poisson_lagrangian(mc.f, mc.alpha);
  P1Space space(uniform_interval_mesh(4));
  std::vector<double> u = fem_solve(L, space, 1e-13, LoadQuadrature::Refined);
  FemError e = fem_error(space, u, mc.u);
  CHECK(e.max < 1e-12);
}

TEST_CASE("fem convergence on sinsin2d") {
  ManufacturedCase mc = manufactured_case("sinsin2d");
  LagrangianFn L = poisson_lagrangian(mc.f, mc.alpha);
  double prev = 0.0;
  for (int n : {4, 8, 16}) {
    P1Space space(triangle_mesh(n));
    FemError e = fem_error(space, fem_solve(L, space, 1e-13, LoadQuadrature::Refined), mc.u);
    if (prev > 0.0) CHECK(std::log2(prev / e.max) == doctest::Approx(2.0).epsilon(0.15));
    prev = e.max;
  }
}

TEST_CASE("csv output") {
  P1Space space(uniform_interval_mesh(2));
  std::ostringstream os;
  write_fem_csv(os, space, {0.0, 0.125, 0.0});
  CHECK(os.str().find("0.125") != std::string::npos);
}
