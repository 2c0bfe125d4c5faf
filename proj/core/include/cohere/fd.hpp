#pragma once

#include <vector>

#include "cohere/functional.hpp"
#include "cohere/grid.hpp"
#include "cohere/problem.hpp"
#include "cohere/sparse.hpp"

namespace cohere {

// The gradient/divergence stencils must pair up in the summation-by-parts
// identity; a forward gradient goes with a backward divergence and vice
// versa. A centered/centered pair does not satisfy the identity.
enum class StencilPair { ForwardBackward, BackwardForward };

struct NodalField {
  CartesianGrid grid;
  std::vector<double> values;  // one per node, extension by zero outside J

  NodalField(CartesianGrid g) : grid(g), values(g.num_nodes(), 0.0) {}
  NodalField(CartesianGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {}
};

struct NodalVectorField {
  CartesianGrid grid;
  std::vector<Vec> values;

  NodalVectorField(CartesianGrid g) : grid(g), values(g.num_nodes(), Vec(g.dim())) {}
};

// Zero the boundary values: the projection onto the variation space V_h.
void apply_boundary_mask(NodalField& u);
bool satisfies_boundary_mask(const NodalField& u);

NodalVectorField grad_h(const NodalField& u, StencilPair pair = StencilPair::ForwardBackward);
NodalField div_h(const NodalVectorField& p, StencilPair pair = StencilPair::ForwardBackward);

// | sum_j p_j . (grad_h u)_j h^d + sum_j (div_h p)_j u_j h^d |, relative to
// the larger of the two sums. Throws when u violates the V_h boundary mask.
double fd_green_gauss_defect(const NodalField& u, const NodalVectorField& p,
                             StencilPair pair = StencilPair::ForwardBackward);

// (dL/dy - div_h dL/dv)_j at interior nodes, zero on the boundary.
NodalField fd_el_residual(const LagrangianFn& L, const NodalField& u,
                          StencilPair pair = StencilPair::ForwardBackward);

// L_h(u) = sum_{j in J} L(x_j, u_j, (grad_h u)_j) h^d over V_h-masked fields.
DiscreteFunctional fd_lagrangian(const LagrangianFn& L, const CartesianGrid& grid,
                                 StencilPair pair = StencilPair::ForwardBackward);

// Per-DOF scaling for the coherence identity: h^d at interior nodes, 0 on
// the boundary.
std::vector<double> fd_coherence_mass(const CartesianGrid& grid);

// Stiffness matrix of -div_h(alpha grad_h .) over interior nodes.
SparseMatrix fd_assemble_poisson(const Diffusivity& alpha, const CartesianGrid& grid,
                                 StencilPair pair = StencilPair::ForwardBackward);

NodalField fd_solve(const LagrangianFn& L, const CartesianGrid& grid, double tol = 1e-12,
                    StencilPair pair = StencilPair::ForwardBackward);

// Discrete L2 and max error against an exact solution at the nodes.
struct GridError {
  double l2 = 0.0;
  double max = 0.0;
};
GridError fd_error(const NodalField& u, const ScalarField& exact);

void write_nodal_csv(std::ostream& out, const NodalField& u);

}  // namespace cohere
