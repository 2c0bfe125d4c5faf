#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cohere/functional.hpp"
#include "cohere/sparse.hpp"
#include "oracles.hpp"

using namespace cohere;

namespace {

// F(x) = 1/2 x^T A x - b^T x for a fixed small SPD matrix
DiscreteFunctional quadratic_functional(const oracle::Dense& a, const std::vector<double>& b) {
  DiscreteFunctional F;
  F.tag = SpaceTag::FdNodal;
  F.dim = b.size();
  F.quadratic = true;
  F.convex = true;
  F.eval = [a, b](const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      s -= b[i] * x[i];
      for (std::size_t j = 0; j < x.size(); ++j) s += 0.5 * x[i] * a[i][j] * x[j];
    }
    return s;
  };
  F.gradient = [a, b](const std::vector<double>& x) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      g[i] = -b[i];
      for (std::size_t j = 0; j < x.size(); ++j) g[i] += a[i][j] * x[j];
    }
    return g;
  };
  return F;
}

// smooth non-quadratic convex functional: sum (x_i^4 + x_i^2 - c_i x_i)
DiscreteFunctional quartic_functional(const std::vector<double>& c) {
  DiscreteFunctional F;
  F.tag = SpaceTag::FdNodal;
  F.dim = c.size();
  F.convex = true;
  F.eval = [c](const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      s += x[i] * x[i] * x[i] * x[i] + x[i] * x[i] - c[i] * x[i];
    return s;
  };
  F.gradient = [c](const std::vector<double>& x) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      g[i] = 4.0 * x[i] * x[i] * x[i] + 2.0 * x[i] - c[i];
    return g;
  };
  return F;
}

}  // namespace

TEST_CASE("space tag and dimension checks") {
  DiscreteFunctional F = quartic_functional({1.0, 2.0});
  CHECK_THROWS_AS(F.check({SpaceTag::FvCell, {0.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(F.check({SpaceTag::FdNodal, {0.0}}), std::invalid_argument);
  CHECK(F({SpaceTag::FdNodal, {0.0, 0.0}}) == doctest::Approx(0.0));
}

TEST_CASE("gateaux derivative agrees with finite differences") {
  std::mt19937_64 rng(5);
  DiscreteFunctional F = quartic_functional(oracle::random_vector(6, rng));
  for (int t = 0; t < 20; ++t) {
    DOFVector u{SpaceTag::FdNodal, oracle::random_vector(6, rng)};
    DOFVector v{SpaceTag::FdNodal, oracle::random_vector(6, rng)};
    CHECK(gateaux_fd_check(F, u, v) < 1e-8);
  }
}

TEST_CASE("find_extremal on quadratic functionals matches the direct solve") {
  std::mt19937_64 rng(11);
  const std::size_t n = 8;
  oracle::Dense r(n, std::vector<double>(n));
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (auto& row : r)
    for (double& v : row) v = unif(rng);
  oracle::Dense a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) a[i][j] += r[k][i] * r[k][j];
      if (i == j) a[i][j] += static_cast<double>(n);
    }
  std::vector<double> b = oracle::random_vector(n, rng);
  DiscreteFunctional F = quadratic_functional(a, b);
  DOFVector u = find_extremal(F, {SpaceTag::FdNodal, std::vector<double>(n, 0.0)}, 1e-12);
  std::vector<double> ref = oracle::gauss_solve(a, b);
  for (std::size_t i = 0; i < n; ++i) CHECK(u.x[i] == doctest::Approx(ref[i]).epsilon(1e-8));
}

TEST_CASE("find_extremal on a non-quadratic convex functional") {
  std::vector<double> c{6.0, -6.0, 1.0};
  DiscreteFunctional F = quartic_functional(c);
  // the Armijo search cannot certify descent below roundoff in eval, so the
  // reachable gradient tolerance is ~sqrt(eps), not eps
  DOFVector u = find_extremal(F, {SpaceTag::FdNodal, {0.5, -0.5, 0.0}}, 1e-6);
  CHECK(norm_inf(F.gradient(u.x)) < 1e-5);
  CHECK(u.x[0] == doctest::Approx(1.0));   // 4x^3 + 2x = 6
  CHECK(u.x[1] == doctest::Approx(-1.0));
}

TEST_CASE("find_extremal reports failure on concave quadratics") {
  oracle::Dense a{{-1.0, 0.0}, {0.0, -1.0}};
  DiscreteFunctional F = quadratic_functional(a, {0.1, 0.1});
  CHECK_THROWS_AS(find_extremal(F, {SpaceTag::FdNodal, {1.0, 1.0}}, 1e-10), ExtremalFailure);
  try {
    find_extremal(F, {SpaceTag::FdNodal, {1.0, 1.0}}, 1e-10);
  } catch (const ExtremalFailure& e) {
    CHECK(e.best_iterate.x.size() == 2);
    CHECK(e.residual_norm > 0.0);
  }
}

TEST_CASE("coherence_check accepts the identity and rejects a broken mass") {
  std::mt19937_64 rng(3);
  oracle::Dense a{{4.0, -1.0, 0.0}, {-1.0, 4.0, -1.0}, {0.0, -1.0, 4.0}};
  std::vector<double> b = oracle::random_vector(3, rng);
  DiscreteFunctional F = quadratic_functional(a, b);
  std::vector<double> mass{2.0, 2.0, 2.0};
  auto residual = [&](const std::vector<double>& x) {
    std::vector<double> r = F.gradient(x);
    for (double& v : r) v *= 0.5;  // residual = gradient / mass
    return r;
  };
  CoherenceReport ok = coherence_check(F, residual, mass, 10, 42, 1e-12, "toy", "3dof");
  CHECK(ok.pass);
  CHECK(ok.max_rel <= 1e-14);

  std::vector<double> wrong{2.0, 2.5, 2.0};
  CoherenceReport bad = coherence_check(F, residual, wrong, 10, 42, 1e-12, "toy", "3dof");
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_rel > 1e-3);

  // determinism: identical seeds give byte-identical reports
  CoherenceReport again = coherence_check(F, residual, wrong, 10, 42, 1e-12, "toy", "3dof");
  CHECK(bad.to_json() == again.to_json());
  CoherenceReport other = coherence_check(F, residual, wrong, 10, 43, 1e-12, "toy", "3dof");
  CHECK(bad.to_json() != other.to_json());
}
