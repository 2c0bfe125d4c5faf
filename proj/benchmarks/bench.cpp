#include <benchmark/benchmark.h>

#include <random>

#include "cohere/fd.hpp"
#include "cohere/fv.hpp"
#include "cohere/problem.hpp"

using namespace cohere;

static void BM_FdResidual2d(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  CartesianGrid grid(2, n);
  ManufacturedCase mc = manufactured_case("sinsin2d");
  LagrangianFn L = poisson_lagrangian(mc.f, mc.alpha);
  NodalField u(grid);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (double& v : u.values) v = unif(rng);
  apply_boundary_mask(u);
  for (auto _ : state) {
    NodalField r = fd_el_residual(L, u);
    benchmark::DoNotOptimize(r.values.data());
  }
}
BENCHMARK(BM_FdResidual2d)->Arg(16)->Arg(64);

static void BM_FvLaplacian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  MeshHandle mesh = make_centered(cartesian_mesh(n, n));
  CellField u(mesh);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (double& v : u.values) v = unif(rng);
  for (auto _ : state) {
    CellField lap = fv_laplacian(u);
    benchmark::DoNotOptimize(lap.values.data());
  }
}
BENCHMARK(BM_FvLaplacian)->Arg(8)->Arg(32);

static void BM_FdSolve2d(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  CartesianGrid grid(2, n);
  ManufacturedCase mc = manufactured_case("sinsin2d");
  LagrangianFn L = poisson_lagrangian(mc.f, mc.alpha);
  for (auto _ : state) {
    NodalField u = fd_solve(L, grid, 1e-10);
    benchmark::DoNotOptimize(u.values.data());
  }
}
BENCHMARK(BM_FdSolve2d)->Arg(16)->Arg(32);

BENCHMARK_MAIN();
