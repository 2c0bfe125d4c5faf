#include "cohere/fv.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace cohere {

namespace {

// 5-point Gauss-Legendre on [0,1].
constexpr double kGaussX[5] = {0.5, 0.5 - 0.26923465505284155, 0.5 + 0.26923465505284155,
                               0.5 - 0.453089922969332, 0.5 + 0.453089922969332};
constexpr double kGaussW[5] = {0.28444444444444444, 0.23931433524968323, 0.23931433524968323,
                               0.11846344252809454, 0.11846344252809454};

double integrate_triangle(const ScalarField& f, const Vec& a, const Vec& b, const Vec& c,
                          int depth) {
  if (depth == 0) {
    double area = 0.5 * std::abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
    return area / 3.0 * (f(0.5 * (a + b)) + f(0.5 * (b + c)) + f(0.5 * (c + a)));
  }
  Vec ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  return integrate_triangle(f, a, ab, ca, depth - 1) + integrate_triangle(f, ab, b, bc, depth - 1) +
         integrate_triangle(f, ca, bc, c, depth - 1) + integrate_triangle(f, ab, bc, ca, depth - 1);
}

double cell_average(const ScalarField& f, const CenteredMesh& cm, int k, CellQuadrature quad) {
  const PolyMesh& mesh = cm.mesh;
  if (quad == CellQuadrature::Midpoint) return f(cm.cell_center[k]);
  if (mesh.dim() == 1) {
    const auto& cv = mesh.cell_vertices(k);
    const Vec& pa = mesh.vertex(cv[0]);
    const Vec& pb = mesh.vertex(cv[1]);
    double s = 0.0;
    for (int q = 0; q < 5; ++q) s += kGaussW[q] * f((1.0 - kGaussX[q]) * pa + kGaussX[q] * pb);
    return s;
  }
  // fan triangulation around the centroid, refined midpoint rule per piece
  const auto& cv = mesh.cell_vertices(k);
  const Vec& c = mesh.cell_centroid(k);
  double s = 0.0;
  for (std::size_t i = 0; i < cv.size(); ++i) {
    const Vec& a = mesh.vertex(cv[i]);
    const Vec& b = mesh.vertex(cv[(i + 1) % cv.size()]);
    s += integrate_triangle(f, c, a, b, 2);
  }
  return s / mesh.cell_measure(k);
}

}  // namespace

CellField fv_interpolate(const ScalarField& f, const MeshHandle& mesh, CellQuadrature quad) {
  CellField out(mesh);
  for (int k = 0; k < mesh->mesh.num_cells(); ++k)
    out.values[k] = cell_average(f, *mesh, k, quad);
  return out;
}

FluxDistribution fv_fluxes(const CellField& u) {
  const CenteredMesh& cm = *u.mesh;
  if (!cm.admissible)
    throw std::invalid_argument("fv_fluxes: mesh is not admissible");
  FluxDistribution F(u.mesh);
  for (int e = 0; e < cm.mesh.num_faces(); ++e) {
    const Face& f = cm.mesh.face(e);
    double phi = f.boundary() ? -u.values[f.cell_in] / cm.d_e[e]
                              : (u.values[f.cell_out] - u.values[f.cell_in]) / cm.d_e[e];
    F.set(e, phi);
  }
  return F;
}

CellField fv_div(const FluxDistribution& F) {
  const PolyMesh& mesh = F.mesh->mesh;
  CellField out(F.mesh);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    double s = 0.0;
    for (int e : mesh.cell_faces(k)) s += F.from_cell(k, e) * mesh.face(e).measure;
    out.values[k] = s / mesh.cell_measure(k);
  }
  return out;
}

CellField fv_laplacian(const CellField& u) { return fv_div(fv_fluxes(u)); }

double fv_green_gauss_defect(const FluxDistribution& F, const CellField& u) {
  if (!F.continuous)
    throw std::invalid_argument("fv_green_gauss_defect: continuity flag unset");
  const CenteredMesh& cm = *F.mesh;
  const PolyMesh& mesh = cm.mesh;
  CellField dF = fv_div(F);
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k)
    s1 += dF.values[k] * u.values[k] * mesh.cell_measure(k);
  for (int e = 0; e < mesh.num_faces(); ++e) {
    const Face& f = mesh.face(e);
    if (f.boundary())
      s3 -= F.canon[e] * u.values[f.cell_in] * f.measure;
    else
      s2 += F.canon[e] * (u.values[f.cell_out] - u.values[f.cell_in]) * f.measure;
  }
  return std::abs(s1 + s2 + s3) / std::max({1.0, std::abs(s1), std::abs(s2), std::abs(s3)});
}

CellField fv_el_residual(const CellField& If, const CellField& u) {
  CellField lap = fv_laplacian(u);
  CellField r(u.mesh);
  for (std::size_t k = 0; k < r.values.size(); ++k)
    r.values[k] = -(If.values[k] + lap.values[k]);
  return r;
}

DiscreteFunctional fv_lagrangian(const CellField& If) {
  MeshHandle mesh = If.mesh;
  std::vector<double> load = If.values;
  DiscreteFunctional F;
  F.tag = SpaceTag::FvCell;
  F.dim = load.size();
  F.quadratic = true;
  F.convex = true;
  F.eval = [mesh, load](const std::vector<double>& x) {
    CellField u(mesh, x);
    FluxDistribution phi = fv_fluxes(u);
    const CenteredMesh& cm = *mesh;
    double s = 0.0;
    for (int e = 0; e < cm.mesh.num_faces(); ++e)
      s += 0.5 * phi.canon[e] * phi.canon[e] * cm.mesh.face(e).measure * cm.d_e[e];
    for (int k = 0; k < cm.mesh.num_cells(); ++k)
      s -= load[k] * x[k] * cm.mesh.cell_measure(k);
    return s;
  };
  F.gradient = [mesh, load](const std::vector<double>& x) {
    CellField u(mesh, x);
    CellField lap = fv_laplacian(u);
    std::vector<double> g(x.size());
    for (std::size_t k = 0; k < x.size(); ++k)
      g[k] = -(load[k] + lap.values[k]) * mesh->mesh.cell_measure(static_cast<int>(k));
    return g;
  };
  return F;
}

std::vector<double> fv_coherence_mass(const MeshHandle& mesh) {
  std::vector<double> m(mesh->mesh.num_cells());
  for (int k = 0; k < mesh->mesh.num_cells(); ++k) m[k] = mesh->mesh.cell_measure(k);
  return m;
}

SparseMatrix fv_assemble_poisson(const MeshHandle& mesh) {
  const CenteredMesh& cm = *mesh;
  if (!cm.admissible) throw std::invalid_argument("fv_assemble_poisson: mesh is not admissible");
  const PolyMesh& m = cm.mesh;
  std::size_t n = m.num_cells();
  SparseMatrix A(n, n);
  for (int e = 0; e < m.num_faces(); ++e) {
    const Face& f = m.face(e);
    double t = f.measure / cm.d_e[e];
    std::size_t i = f.cell_in;
    if (f.boundary()) {
      A.add(i, i, t);
    } else {
      std::size_t j = f.cell_out;
      A.add(i, i, t);
      A.add(j, j, t);
      A.add(i, j, -t);
      A.add(j, i, -t);
    }
  }
  A.finalize();
  A.set_symmetric(true);
  return A;
}

CellField fv_solve(const ScalarField& f, const MeshHandle& mesh, double tol, CellQuadrature quad) {
  CellField If = fv_interpolate(f, mesh, quad);
  SparseMatrix A = fv_assemble_poisson(mesh);
  std::vector<double> b(If.values.size());
  for (std::size_t k = 0; k < b.size(); ++k)
    b[k] = If.values[k] * mesh->mesh.cell_measure(static_cast<int>(k));
  return CellField(mesh, cg_solve(A, b, tol));
}

CellError fv_error(const CellField& u, const ScalarField& exact) {
  const CenteredMesh& cm = *u.mesh;
  CellError err;
  double s = 0.0;
  for (int k = 0; k < cm.mesh.num_cells(); ++k) {
    double e = u.values[k] - exact(cm.cell_center[k]);
    s += e * e * cm.mesh.cell_measure(k);
    err.max = std::max(err.max, std::abs(e));
  }
  err.l2 = std::sqrt(s);
  return err;
}

void write_cell_csv(std::ostream& out, const CellField& u) {
  const CenteredMesh& cm = *u.mesh;
  out << "cell_id";
  for (int i = 0; i < cm.mesh.dim(); ++i) out << ",x" << i + 1;
  out << ",u\n";
  out.precision(17);
  for (int k = 0; k < cm.mesh.num_cells(); ++k) {
    out << k;
    for (int i = 0; i < cm.mesh.dim(); ++i) out << "," << cm.cell_center[k][i];
    out << "," << u.values[k] << "\n";
  }
}

}  // namespace cohere
