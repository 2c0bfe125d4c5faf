#pragma once

#include <vector>

#include "cohere/functional.hpp"
#include "cohere/polymesh.hpp"
#include "cohere/problem.hpp"
#include "cohere/sparse.hpp"

namespace cohere {

enum class LoadQuadrature { Midpoint, Refined };

// Conforming P1 Lagrange space on a simplicial mesh (intervals or
// triangles). DOFs are the mesh vertices; the homogeneous Dirichlet
// condition is a mask on the boundary nodes.
class P1Space {
 public:
  explicit P1Space(PolyMesh mesh);  // throws on non-simplicial cells

  const PolyMesh& mesh() const { return mesh_; }
  int num_nodes() const { return mesh_.num_vertices(); }
  bool boundary_node(int v) const { return boundary_node_[v]; }
  // Constant gradient of the hat function of local vertex a on cell k.
  const Vec& shape_grad(int k, int a) const { return shape_grad_[k][a]; }

 private:
  PolyMesh mesh_;
  std::vector<bool> boundary_node_;
  std::vector<std::vector<Vec>> shape_grad_;
};

// Weak-form residual of the Euler-Lagrange equation with barycenter
// quadrature; zero rows at masked boundary nodes.
std::vector<double> fem_weak_residual(const LagrangianFn& L, const P1Space& space,
                                      const std::vector<double>& u);

// Restriction of the continuous functional to the P1 space, with the same
// barycenter quadrature as the weak residual.
DiscreteFunctional fem_lagrangian(const LagrangianFn& L, const P1Space& space);

SparseMatrix fem_assemble_poisson(const Diffusivity& alpha, const P1Space& space,
                                  std::vector<std::size_t>& free_nodes);
std::vector<double> fem_load_vector(const ScalarField& f, const P1Space& space,
                                    const std::vector<std::size_t>& free_nodes,
                                    LoadQuadrature quad = LoadQuadrature::Midpoint);

std::vector<double> fem_solve(const LagrangianFn& L, const P1Space& space, double tol = 1e-12,
                              LoadQuadrature quad = LoadQuadrature::Midpoint);

struct FemError {
  double l2 = 0.0;   // midpoint-quadrature L2 norm of u_h - u
  double max = 0.0;  // nodal max error
};
FemError fem_error(const P1Space& space, const std::vector<double>& u, const ScalarField& exact);

void write_fem_csv(std::ostream& out, const P1Space& space, const std::vector<double>& u);

}  // namespace cohere
