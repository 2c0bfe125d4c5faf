#include "cohere/fem.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace cohere {

P1Space::P1Space(PolyMesh mesh) : mesh_(std::move(mesh)) {
  const int d = mesh_.dim();
  for (int k = 0; k < mesh_.num_cells(); ++k)
    if (static_cast<int>(mesh_.cell_vertices(k).size()) != d + 1)
      throw std::invalid_argument("P1Space: mesh must be simplicial");

  boundary_node_.assign(mesh_.num_vertices(), false);
  for (int e = 0; e < mesh_.num_faces(); ++e) {
    const Face& f = mesh_.face(e);
    if (!f.boundary()) continue;
    for (int i = 0; i < f.num_verts; ++i) boundary_node_[f.verts[i]] = true;
  }

  shape_grad_.resize(mesh_.num_cells());
  for (int k = 0; k < mesh_.num_cells(); ++k) {
    const auto& cv = mesh_.cell_vertices(k);
    auto& grads = shape_grad_[k];
    grads.resize(cv.size());
    if (d == 1) {
      double len = mesh_.cell_measure(k);
      grads[0] = Vec(-1.0 / len);
      grads[1] = Vec(1.0 / len);
    } else {
      const Vec& p0 = mesh_.vertex(cv[0]);
      const Vec& p1 = mesh_.vertex(cv[1]);
      const Vec& p2 = mesh_.vertex(cv[2]);
      double det = 2.0 * mesh_.cell_measure(k);
      // gradients of the barycentric coordinates
      grads[0] = Vec((p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det);
      grads[1] = Vec((p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det);
      grads[2] = Vec((p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det);
    }
  }
}

namespace {

// u_h and grad u_h on cell k at the barycenter.
void cell_state(const P1Space& space, const std::vector<double>& u, int k,
                double& uq, Vec& gq) {
  const PolyMesh& mesh = space.mesh();
  const auto& cv = mesh.cell_vertices(k);
  uq = 0.0;
  gq = Vec(mesh.dim());
  for (std::size_t a = 0; a < cv.size(); ++a) {
    uq += u[cv[a]];
    gq += u[cv[a]] * space.shape_grad(k, static_cast<int>(a));
  }
  uq /= static_cast<double>(cv.size());
}

std::vector<double> masked(const P1Space& space, const std::vector<double>& u) {
  std::vector<double> m = u;
  for (int v = 0; v < space.num_nodes(); ++v)
    if (space.boundary_node(v)) m[v] = 0.0;
  return m;
}

}  // namespace

std::vector<double> fem_weak_residual(const LagrangianFn& L, const P1Space& space,
                                      const std::vector<double>& u) {
  const PolyMesh& mesh = space.mesh();
  std::vector<double> um = masked(space, u);
  std::vector<double> r(space.num_nodes(), 0.0);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const auto& cv = mesh.cell_vertices(k);
    double uq;
    Vec gq;
    cell_state(space, um, k, uq, gq);
    Vec xq = mesh.cell_centroid(k);
    double w = mesh.cell_measure(k);
    double ly = L.dy(xq, uq, gq);
    Vec lv = L.dv(xq, uq, gq);
    double phi = 1.0 / static_cast<double>(cv.size());
    for (std::size_t a = 0; a < cv.size(); ++a)
      r[cv[a]] += w * (ly * phi + lv.dot(space.shape_grad(k, static_cast<int>(a))));
  }
  for (int v = 0; v < space.num_nodes(); ++v)
    if (space.boundary_node(v)) r[v] = 0.0;
  return r;
}

DiscreteFunctional fem_lagrangian(const LagrangianFn& L, const P1Space& space) {
  DiscreteFunctional F;
  F.tag = SpaceTag::FemNodal;
  F.dim = space.num_nodes();
  F.quadratic = static_cast<bool>(L.poisson);
  F.convex = L.convex;
  F.eval = [L, &space](const std::vector<double>& x) {
    const PolyMesh& mesh = space.mesh();
    std::vector<double> um = masked(space, x);
    double s = 0.0;
    for (int k = 0; k < mesh.num_cells(); ++k) {
      double uq;
      Vec gq;
      cell_state(space, um, k, uq, gq);
      s += mesh.cell_measure(k) * L.eval(mesh.cell_centroid(k), uq, gq);
    }
    return s;
  };
  F.gradient = [L, &space](const std::vector<double>& x) {
    return fem_weak_residual(L, space, x);
  };
  return F;
}

SparseMatrix fem_assemble_poisson(const Diffusivity& alpha, const P1Space& space,
                                  std::vector<std::size_t>& free_nodes) {
  const PolyMesh& mesh = space.mesh();
  free_nodes.clear();
  std::vector<std::size_t> id(space.num_nodes(), SIZE_MAX);
  for (int v = 0; v < space.num_nodes(); ++v)
    if (!space.boundary_node(v)) {
      id[v] = free_nodes.size();
      free_nodes.push_back(v);
    }
  SparseMatrix A(free_nodes.size(), free_nodes.size());
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const auto& cv = mesh.cell_vertices(k);
    Mat a = alpha.at(mesh.cell_centroid(k));
    double w = mesh.cell_measure(k);
    for (std::size_t i = 0; i < cv.size(); ++i) {
      if (id[cv[i]] == SIZE_MAX) continue;
      Vec agi = a.apply(space.shape_grad(k, static_cast<int>(i)));
      for (std::size_t j = 0; j < cv.size(); ++j) {
        if (id[cv[j]] == SIZE_MAX) continue;
        A.add(id[cv[i]], id[cv[j]], w * agi.dot(space.shape_grad(k, static_cast<int>(j))));
      }
    }
  }
  A.finalize();
  A.set_symmetric(true);
  return A;
}

std::vector<double> fem_load_vector(const ScalarField& f, const P1Space& space,
                                    const std::vector<std::size_t>& free_nodes,
                                    LoadQuadrature quad) {
  const PolyMesh& mesh = space.mesh();
  std::vector<double> full(space.num_nodes(), 0.0);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const auto& cv = mesh.cell_vertices(k);
    double w = mesh.cell_measure(k);
    if (quad == LoadQuadrature::Midpoint) {
      double fq = f(mesh.cell_centroid(k));
      for (std::size_t a = 0; a < cv.size(); ++a)
        full[cv[a]] += w * fq / static_cast<double>(cv.size());
    } else if (mesh.dim() == 1) {
      // two-point Gauss, exact through cubic integrands
      const Vec& pa = mesh.vertex(cv[0]);
      const Vec& pb = mesh.vertex(cv[1]);
      double r = 1.0 / std::sqrt(3.0);
      for (double t : {0.5 * (1.0 - r), 0.5 * (1.0 + r)}) {
        Vec x = (1.0 - t) * pa + t * pb;
        full[cv[0]] += 0.5 * w * f(x) * (1.0 - t);
        full[cv[1]] += 0.5 * w * f(x) * t;
      }
    } else {
      // edge-midpoint rule, degree-2 exact
      const Vec& p0 = mesh.vertex(cv[0]);
      const Vec& p1 = mesh.vertex(cv[1]);
      const Vec& p2 = mesh.vertex(cv[2]);
      const Vec mids[3] = {0.5 * (p0 + p1), 0.5 * (p1 + p2), 0.5 * (p2 + p0)};
      const double lam[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
      for (int q = 0; q < 3; ++q) {
        double fq = f(mids[q]);
        for (int a = 0; a < 3; ++a) full[cv[a]] += w / 3.0 * fq * lam[q][a];
      }
    }
  }
  std::vector<double> b(free_nodes.size());
  for (std::size_t i = 0; i < free_nodes.size(); ++i) b[i] = full[free_nodes[i]];
  return b;
}

std::vector<double> fem_solve(const LagrangianFn& L, const P1Space& space, double tol,
                              LoadQuadrature quad) {
  if (L.poisson) {
    std::vector<std::size_t> free_nodes;
    SparseMatrix A = fem_assemble_poisson(L.poisson->alpha, space, free_nodes);
    std::vector<double> b = fem_load_vector(L.poisson->f, space, free_nodes, quad);
    std::vector<double> x = cg_solve(A, b, tol);
    std::vector<double> u(space.num_nodes(), 0.0);
    for (std::size_t i = 0; i < free_nodes.size(); ++i) u[free_nodes[i]] = x[i];
    return u;
  }
  DiscreteFunctional F = fem_lagrangian(L, space);
  DOFVector u0{SpaceTag::FemNodal, std::vector<double>(space.num_nodes(), 0.0)};
  return find_extremal(F, u0, tol).x;
}

FemError fem_error(const P1Space& space, const std::vector<double>& u, const ScalarField& exact) {
  const PolyMesh& mesh = space.mesh();
  FemError err;
  double s = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    double uq;
    Vec gq;
    cell_state(space, u, k, uq, gq);
    double e = uq - exact(mesh.cell_centroid(k));
    s += mesh.cell_measure(k) * e * e;
  }
  err.l2 = std::sqrt(s);
  for (int v = 0; v < space.num_nodes(); ++v)
    err.max = std::max(err.max, std::abs(u[v] - exact(mesh.vertex(v))));
  return err;
}

void write_fem_csv(std::ostream& out, const P1Space& space, const std::vector<double>& u) {
  const PolyMesh& mesh = space.mesh();
  out << "node";
  for (int i = 0; i < mesh.dim(); ++i) out << ",x" << i + 1;
  out << ",u\n";
  out.precision(17);
  for (int v = 0; v < space.num_nodes(); ++v) {
    out << v;
    for (int i = 0; i < mesh.dim(); ++i) out << "," << mesh.vertex(v)[i];
    out << "," << u[v] << "\n";
  }
}

}  // namespace cohere
