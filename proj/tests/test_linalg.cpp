#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cohere/sparse.hpp"
#include "oracles.hpp"

using namespace cohere;

namespace {

SparseMatrix random_spd(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  oracle::Dense r(n, std::vector<double>(n));
  for (auto& row : r)
    for (double& v : row) v = unif(rng);
  SparseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = (i == j) ? static_cast<double>(n) : 0.0;  // R^T R + n I
      for (std::size_t k = 0; k < n; ++k) s += r[k][i] * r[k][j];
      a.add(i, j, s);
    }
  a.finalize();
  a.set_symmetric(true);
  return a;
}

}  // namespace

TEST_CASE("triplet assembly merges duplicates deterministically") {
  SparseMatrix a(2, 2);
  a.add(0, 0, 1.0);
  a.add(1, 0, 2.0);
  a.add(0, 0, 3.0);
  a.add(0, 1, -1.0);
  a.finalize();
  auto d = a.to_dense();
  CHECK(d[0][0] == 4.0);
  CHECK(d[0][1] == -1.0);
  CHECK(d[1][0] == 2.0);
  CHECK(d[1][1] == 0.0);

  // same entries, different insertion order: identical matrix
  SparseMatrix b(2, 2);
  b.add(0, 1, -1.0);
  b.add(0, 0, 3.0);
  b.add(0, 0, 1.0);
  b.add(1, 0, 2.0);
  b.finalize();
  CHECK(b.to_dense() == d);

  std::vector<double> y = a.apply({1.0, 2.0});
  CHECK(y[0] == 2.0);
  CHECK(y[1] == 2.0);

  auto t = a.transpose().to_dense();
  CHECK(t[0][1] == 2.0);
  CHECK(t[1][0] == -1.0);
  CHECK(a.max_asymmetry() == doctest::Approx(3.0));
}

TEST_CASE("cg matches dense gaussian elimination") {
  std::mt19937_64 rng(31);
  for (std::size_t n : {3u, 10u, 40u}) {
    SparseMatrix a = random_spd(n, rng);
    std::vector<double> b = oracle::random_vector(n, rng);
    std::vector<double> x = cg_solve(a, b, 1e-13);
    std::vector<double> ref = oracle::gauss_solve(a.to_dense(), b);
    for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-9));
  }
}

TEST_CASE("cg rejects indefinite systems") {
  SparseMatrix a(2, 2);
  a.add(0, 0, 1.0);
  a.add(1, 1, -1.0);
  a.finalize();
  CHECK_THROWS_AS(cg_solve(a, {1.0, 1.0}, 1e-12), std::runtime_error);
}

TEST_CASE("saddle solver agrees with the dense kkt solve") {
  std::mt19937_64 rng(77);
  const std::size_t np = 7, nu = 4;
  SparseMatrix m = random_spd(np, rng);
  SparseMatrix bmat(nu, np);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t j = 0; j < np; ++j) bmat.add(i, j, unif(rng));
  bmat.finalize();
  SaddleSystem sys{m, bmat, oracle::random_vector(nu, rng)};
  SaddleSolution sol = saddle_solve(sys, 1e-12);

  // dense [[M, B^T],[B, 0]]
  oracle::Dense kkt(np + nu, std::vector<double>(np + nu, 0.0));
  auto md = m.to_dense();
  auto bd = bmat.to_dense();
  for (std::size_t i = 0; i < np; ++i)
    for (std::size_t j = 0; j < np; ++j) kkt[i][j] = md[i][j];
  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t j = 0; j < np; ++j) {
      kkt[np + i][j] = bd[i][j];
      kkt[j][np + i] = bd[i][j];
    }
  std::vector<double> rhs(np + nu, 0.0);
  for (std::size_t i = 0; i < nu; ++i) rhs[np + i] = sys.rhs_u[i];
  std::vector<double> ref = oracle::gauss_solve(kkt, rhs);
  for (std::size_t i = 0; i < np; ++i) CHECK(sol.p[i] == doctest::Approx(ref[i]).epsilon(1e-7));
  for (std::size_t i = 0; i < nu; ++i)
    CHECK(sol.u[i] == doctest::Approx(ref[np + i]).epsilon(1e-7));

  // the schur complement B M^-1 B^T is SPD
  oracle::Dense schur(nu, std::vector<double>(nu, 0.0));
  for (std::size_t j = 0; j < nu; ++j) {
    std::vector<double> col = oracle::gauss_solve(md, bd[j]);  // M^-1 B^T e_j (B rows)
    for (std::size_t i = 0; i < nu; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < np; ++k) s += bd[i][k] * col[k];
      schur[i][j] = s;
    }
  }
  // symmetrize away roundoff before the cholesky check
  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t j = 0; j < i; ++j)
      schur[i][j] = schur[j][i] = 0.5 * (schur[i][j] + schur[j][i]);
  CHECK(oracle::is_spd(schur));

  // random probes x^T S x > 0
  for (int t = 0; t < 10; ++t) {
    std::vector<double> x = oracle::random_vector(nu, rng);
    double q = 0.0;
    for (std::size_t i = 0; i < nu; ++i)
      for (std::size_t j = 0; j < nu; ++j) q += x[i] * schur[i][j] * x[j];
    CHECK(q > 0.0);
  }
}

TEST_CASE("norms and dot") {
  std::vector<double> v{3.0, -4.0};
  CHECK(norm2(v) == doctest::Approx(5.0));
  CHECK(norm_inf(v) == doctest::Approx(4.0));
  CHECK(dot(v, v) == doctest::Approx(25.0));
}
