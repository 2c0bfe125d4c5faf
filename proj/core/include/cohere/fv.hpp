#pragma once

#include <vector>

#include "cohere/functional.hpp"
#include "cohere/polymesh.hpp"
#include "cohere/problem.hpp"
#include "cohere/sparse.hpp"

namespace cohere {

enum class CellQuadrature { Midpoint, Refined };

// One value per cell: the space M_h of piecewise constants.
struct CellField {
  MeshHandle mesh;
  std::vector<double> values;

  explicit CellField(MeshHandle m)
      : mesh(std::move(m)), values(mesh->mesh.num_cells(), 0.0) {}
  CellField(MeshHandle m, std::vector<double> v)
      : mesh(std::move(m)), values(std::move(v)) {}
};

// Numerical fluxes per (face, incident cell). While continuous, the two
// sides of an internal face are stored as one canonical value and its
// negation, so the continuity relation holds by construction.
struct FluxDistribution {
  MeshHandle mesh;
  std::vector<double> canon;  // F_{e,cell_in}
  std::vector<double> out;    // F_{e,cell_out}; mirrors -canon while continuous
  bool continuous = true;

  explicit FluxDistribution(MeshHandle m)
      : mesh(std::move(m)),
        canon(mesh->mesh.num_faces(), 0.0),
        out(mesh->mesh.num_faces(), 0.0) {}

  double from_cell(int k, int e) const {
    return mesh->mesh.face(e).cell_in == k ? canon[e] : out[e];
  }
  void set(int e, double value) {
    canon[e] = value;
    out[e] = -value;
  }
  // Test hook: perturb the non-canonical side without clearing the flag,
  // deliberately violating the continuity invariant (negative control).
  void debug_break_continuity(int e, double delta) { out[e] += delta; }
};

// (I f)_K, the cell average of f: midpoint quadrature at the cell center,
// or a refined rule for convergence studies.
CellField fv_interpolate(const ScalarField& f, const MeshHandle& mesh,
                         CellQuadrature quad = CellQuadrature::Midpoint);

// Two-point fluxes of u: internal phi = (u_out - u_in)/d_e, boundary
// phi = -u_K/d_e. Throws on non-admissible meshes.
FluxDistribution fv_fluxes(const CellField& u);

// (div F)_K = (1/|K|) sum_{e in dK} F_{e,K} |e|.
CellField fv_div(const FluxDistribution& F);

// fv_div(fv_fluxes(u)); the discrete Laplace operator.
CellField fv_laplacian(const CellField& u);

// Relative defect of the flux-distribution Green-Gauss formula. Throws when
// the continuity flag is unset.
double fv_green_gauss_defect(const FluxDistribution& F, const CellField& u);

// -( (I f)_K + (Delta_h u)_K ); the differential embedding of the scheme.
CellField fv_el_residual(const CellField& If, const CellField& u);

// L_h(u) = 1/2 sum_e phi_e(u)^2 |e| d_e - sum_K (I f)_K u_K |K|.
DiscreteFunctional fv_lagrangian(const CellField& If);

// Per-cell |K| scaling for the coherence identity.
std::vector<double> fv_coherence_mass(const MeshHandle& mesh);

// Stiffness of -|K| Delta_h (symmetric TPFA matrix over all cells).
SparseMatrix fv_assemble_poisson(const MeshHandle& mesh);

CellField fv_solve(const ScalarField& f, const MeshHandle& mesh, double tol = 1e-12,
                   CellQuadrature quad = CellQuadrature::Midpoint);

struct CellError {
  double l2 = 0.0;   // cell-center error in the |K|-weighted norm
  double max = 0.0;
};
CellError fv_error(const CellField& u, const ScalarField& exact);

void write_cell_csv(std::ostream& out, const CellField& u);

}  // namespace cohere
