#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cohere/mfd.hpp"
#include "cohere/problem.hpp"
#include "oracles.hpp"

using namespace cohere;

namespace {
constexpr double kPi = 3.14159265358979323846;

FaceFluxDOF random_flux(const MeshHandle& mesh, std::mt19937_64& rng) {
  FaceFluxDOF p(mesh);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (double& v : p.values) v = unif(rng);
  return p;
}

CellField random_cells(const MeshHandle& mesh, std::mt19937_64& rng) {
  CellField u(mesh);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (double& v : u.values) v = unif(rng);
  return u;
}
}  // namespace

TEST_CASE("face interpolation and discrete divergence") {
  // q = (x, 0) on the unit square: right face flux 1, left face flux 0,
  // horizontal faces 0; div_h(I q) = 1 in the single cell.
  MeshHandle m = make_centered(cartesian_mesh(1, 1));
  FaceFluxDOF p = mfd_interpolate_flux([](const Vec& x) { return Vec(x[0], 0.0); }, m);
  for (int e = 0; e < m->mesh.num_faces(); ++e) {
    const Face& f = m->mesh.face(e);
    double want = std::abs(f.normal[0]) > 0.5 ? f.center[0] * f.normal[0] : 0.0;
    CHECK(p.values[e] == doctest::Approx(want).epsilon(1e-14));
  }
  CellField d = mfd_div(p);
  CHECK(d.values[0] == doctest::Approx(1.0));
}

TEST_CASE("interpolation commutes with the divergence") {
  // exactly for affine fields
  auto q_affine = [](const Vec& x) { return Vec(1.0 + 2.0 * x[0] + x[1], 3.0 - x[0]); };
  auto div_affine = [](const Vec&) { return 2.0; };
  for (MeshHandle m : {make_centered(cartesian_mesh(3, 2)),
                       make_centered_unchecked(triangle_mesh(2))})
    CHECK(div_commutation_defect(q_affine, div_affine, m) <= 1e-13);

  // at first order under refinement for a smooth field (the flux must vary
  // along the face normals, or the midpoint errors cancel exactly)
  auto q = [](const Vec& x) { return Vec(std::sin(kPi * x[0]), std::cos(kPi * x[1])); };
  auto div_q = [](const Vec& x) { return kPi * (std::cos(kPi * x[0]) - std::sin(kPi * x[1])); };
  double prev = 0.0;
  for (int n : {4, 8, 16}) {
    double defect = div_commutation_defect(q, div_q, make_centered(cartesian_mesh(n, n)));
    if (prev > 0.0) CHECK(std::log2(prev / defect) >= 1.0);
    prev = defect;
  }
}

TEST_CASE("diagonal inner product hand values on two intervals") {
  MeshHandle m = make_centered(uniform_interval_mesh(2));
  CellInnerProduct ip = build_inner_product(m, Diffusivity::identity(1),
                                            InnerProductMode::DiagonalTpfa);
  oracle::Dense g = ip.gram.to_dense();
  for (int e = 0; e < 3; ++e) {
    double want = m->mesh.face(e).boundary() ? 0.25 : 0.5;  // |e| d_{K,e} summed over sides
    CHECK(g[e][e] == doctest::Approx(want));
    for (int e2 = 0; e2 < 3; ++e2)
      if (e2 != e) CHECK(g[e][e2] == 0.0);
  }
}

TEST_CASE("local inner products are spd and exact on constants") {
  std::vector<std::pair<MeshHandle, InnerProductMode>> setups;
  setups.emplace_back(make_centered(uniform_interval_mesh(3)), InnerProductMode::DiagonalTpfa);
  setups.emplace_back(make_centered(cartesian_mesh(3, 2)), InnerProductMode::DiagonalTpfa);
  setups.emplace_back(make_centered(cartesian_mesh(3, 2)), InnerProductMode::Rt0Lifting);
  setups.emplace_back(make_centered_unchecked(triangle_mesh(2)), InnerProductMode::Rt0Lifting);
  for (auto& [m, mode] : setups)
    for (double a : {1.0, 2.0}) {
      Diffusivity alpha = Diffusivity::isotropic(m->mesh.dim(), a);
      CellInnerProduct ip = build_inner_product(m, alpha, mode);
      for (int k = 0; k < m->mesh.num_cells(); ++k) CHECK(oracle::is_spd(ip.local[k]));

      // [I c, I c] = sum_K |K| alpha^-1 c.c for constant fields c
      Vec c = m->mesh.dim() == 1 ? Vec(0.7) : Vec(0.7, -0.4);
      FaceFluxDOF ic = mfd_interpolate_flux([&](const Vec&) { return c; }, m);
      std::vector<double> mic = ip.gram.apply(ic.values);
      CHECK(dot(ic.values, mic) ==
            doctest::Approx(m->mesh.total_measure() * c.dot(c) / a).epsilon(1e-12));
    }
}

TEST_CASE("rt0 local matrices match independent exact integration") {
  // single-cell meshes: every face is canonical, so gram == local in the
  // outward-trace coordinates
  std::vector<MeshHandle> meshes;
  meshes.push_back(make_centered(cartesian_mesh(1, 1)));
  meshes.push_back(make_centered_unchecked(PolyMesh::build(
      2, {Vec(0.0, 0.0), Vec(1.0, 0.0), Vec(0.0, 1.0)}, {{0, 1, 2}})));
  for (const MeshHandle& m : meshes) {
    CellInnerProduct ip = build_inner_product(m, Diffusivity::identity(2),
                                              InnerProductMode::Rt0Lifting);
    const PolyMesh& mesh = m->mesh;
    const auto& cf = mesh.cell_faces(0);
    const std::size_t nf = cf.size();
    oracle::Dense g = ip.gram.to_dense();
    // integrate lift_a . lift_b with an independent rule that is exact for
    // quadratics: uniform refinement + centroid sampling, Richardson-free
    // because the midpoint rule on triangles is degree-2 exact... use a fine
    // tensor/barycentric grid instead and a modest tolerance.
    const int n = 200;
    for (std::size_t a = 0; a < nf; ++a)
      for (std::size_t b = 0; b < nf; ++b) {
        std::vector<double> ea(nf, 0.0), eb(nf, 0.0);
        ea[a] = 1.0;
        eb[b] = 1.0;
        double sum = 0.0, area = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            Vec x((i + 0.5) / n, (j + 0.5) / n);
            if (mesh.num_vertices() == 3 && x[0] + x[1] > 1.0) continue;
            sum += ip_lift(ip, 0, ea, x).dot(ip_lift(ip, 0, eb, x));
            area += 1.0;
          }
        double cell = mesh.cell_measure(0);
        double integral = sum / (n * double(n));
        CHECK(area / (n * double(n)) == doctest::Approx(cell).epsilon(1e-2));
        CHECK(g[cf[a]][cf[b]] == doctest::Approx(integral).epsilon(2e-2));
      }
    // and the unit-square values in closed form: 1/3 diagonal, -1/6 for the
    // opposite face, 0 for orthogonal pairs
    if (mesh.num_vertices() == 4) {
      for (std::size_t a = 0; a < nf; ++a)
        for (std::size_t b = 0; b < nf; ++b) {
          const Vec& na = mesh.face(cf[a]).normal;
          const Vec& nb = mesh.face(cf[b]).normal;
          double ip_ab = g[cf[a]][cf[b]];
          double sign = mesh.face_sign(0, cf[a]) * mesh.face_sign(0, cf[b]);
          if (a == b)
            CHECK(ip_ab == doctest::Approx(1.0 / 3.0));
          else if (std::abs(na.dot(nb)) > 0.5)
            CHECK(sign * ip_ab == doctest::Approx(-1.0 / 6.0));
          else
            CHECK(ip_ab == doctest::Approx(0.0).epsilon(1e-13));
        }
    }
  }
}

TEST_CASE("lifting consistency conditions") {
  std::vector<std::pair<MeshHandle, InnerProductMode>> setups;
  setups.emplace_back(make_centered(uniform_interval_mesh(4)), InnerProductMode::DiagonalTpfa);
  setups.emplace_back(make_centered(cartesian_mesh(3, 3)), InnerProductMode::DiagonalTpfa);
  setups.emplace_back(make_centered(cartesian_mesh(3, 3)), InnerProductMode::Rt0Lifting);
  setups.emplace_back(make_centered_unchecked(triangle_mesh(2)), InnerProductMode::Rt0Lifting);
  for (auto& [m, mode] : setups) {
    CellInnerProduct ip = build_inner_product(m, Diffusivity::identity(m->mesh.dim()), mode);
    for (int k = 0; k < m->mesh.num_cells(); ++k) {
      LiftingCheck c = lifting_consistency(ip, k, 1234 + k);
      CHECK(c.trace <= 1e-12);
      CHECK(c.divergence <= 1e-12);
      CHECK(c.constant <= 1e-12);
    }
  }
}

TEST_CASE("saddle assembly and the 1d hand solve") {
  ManufacturedCase mc = manufactured_case("quad1d");
  MeshHandle m = make_centered(uniform_interval_mesh(2));
  CellInnerProduct ip = build_inner_product(m, mc.alpha, InnerProductMode::DiagonalTpfa);
  CellField If = fv_interpolate(mc.f, m);
  SaddleSystem sys = mfd_assemble(ip, If);
  CHECK(sys.M.max_asymmetry() < 1e-14);
  CHECK(sys.rhs_u[0] == doctest::Approx(-0.5));  // -If |K|

  MixedState s = mfd_solve(m, mc.alpha, mc.f, InnerProductMode::DiagonalTpfa);
  CHECK(s.u.values[0] == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(s.u.values[1] == doctest::Approx(0.125).epsilon(1e-12));
  // the flux unknown is alpha u' = (1 - 2x)/2 in the canonical direction
  for (int e = 0; e < 3; ++e) {
    const Face& f = m->mesh.face(e);
    double exact = 0.5 * (1.0 - 2.0 * f.center[0]);
    CHECK(s.p.values[e] == doctest::Approx(exact * f.normal[0]).epsilon(1e-12));
  }

  DiscreteFunctional H = mfd_hamiltonian(m, mc.alpha, mc.f, InnerProductMode::DiagonalTpfa);
  CHECK(H.eval(pack_state(s)) == doctest::Approx(-1.0 / 16.0).epsilon(1e-13));
  CHECK(norm_inf(H.gradient(pack_state(s))) < 1e-11);
}

TEST_CASE("diagonal inner product reproduces the tpfa scheme") {
  for (auto [mesh, name] : std::vector<std::pair<PolyMesh, const char*>>{
           {uniform_interval_mesh(2), "quad1d"},
           {uniform_interval_mesh(4), "sin1d"},
           {cartesian_mesh(4, 4), "sinsin2d"}}) {
    ManufacturedCase mc = manufactured_case(name);
    MeshHandle m = make_centered(mesh);
    MixedState s = mfd_solve(m, mc.alpha, mc.f, InnerProductMode::DiagonalTpfa);
    CellField uf = fv_solve(mc.f, m);
    for (int k = 0; k < m->mesh.num_cells(); ++k)
      CHECK(s.u.values[k] == doctest::Approx(uf.values[k]).epsilon(1e-10));
  }
}

TEST_CASE("adjointness of the discrete flux operator") {
  std::mt19937_64 rng(41);
  std::vector<std::pair<MeshHandle, InnerProductMode>> setups;
  setups.emplace_back(make_centered(cartesian_mesh(3, 3)), InnerProductMode::DiagonalTpfa);
  setups.emplace_back(make_centered(cartesian_mesh(3, 3)), InnerProductMode::Rt0Lifting);
  setups.emplace_back(make_centered_unchecked(triangle_mesh(2)), InnerProductMode::Rt0Lifting);
  for (auto& [m, mode] : setups) {
    CellInnerProduct ip = build_inner_product(m, Diffusivity::identity(2), mode);
    for (int t = 0; t < 10; ++t)
      CHECK(adjointness_defect(random_flux(m, rng), random_cells(m, rng), ip) <= 1e-10);
  }
}

TEST_CASE("mfd coherence identity on random states") {
  for (auto& [m, mode] : std::vector<std::pair<MeshHandle, InnerProductMode>>{
           {make_centered(uniform_interval_mesh(3)), InnerProductMode::DiagonalTpfa},
           {make_centered(cartesian_mesh(3, 3)), InnerProductMode::Rt0Lifting}}) {
    ManufacturedCase mc = manufactured_case(m->mesh.dim() == 1 ? "sin1d" : "sinsin2d");
    auto ip = std::make_shared<const CellInnerProduct>(
        build_inner_product(m, mc.alpha, mode));
    CellField If = fv_interpolate(mc.f, m);
    DiscreteFunctional H = mfd_hamiltonian(ip, If);
    CoherenceReport rep = coherence_check(H, mfd_block_residual(ip, If),
                                          mfd_coherence_mass(m), 10, 6, 1e-12, "mfd", "test");
    CHECK(rep.pass);
  }
}

TEST_CASE("rt0 convergence on sinsin2d") {
  ManufacturedCase mc = manufactured_case("sinsin2d");
  double prev_u = 0.0;
  for (int n : {4, 8, 16}) {
    MeshHandle m = make_centered(cartesian_mesh(n, n));
    MixedState s = mfd_solve(m, mc.alpha, mc.f, InnerProductMode::Rt0Lifting, 1e-13,
                             CellQuadrature::Refined);
    CellError e = fv_error(s.u, mc.u);
    if (prev_u > 0.0) CHECK(std::log2(prev_u / e.l2) >= 0.9);
    prev_u = e.l2;

    // the flux unknown approximates alpha grad u in the face-normal sense
    FaceFluxDOF ref = mfd_interpolate_flux(
        [&](const Vec& x) { return mc.alpha.at(x).apply(mc.grad_u(x)); }, m);
    double err = 0.0;
    for (int e2 = 0; e2 < m->mesh.num_faces(); ++e2)
      err = std::max(err, std::abs(s.p.values[e2] - ref.values[e2]));
    CHECK(err < 2.0 / n);
  }
}
