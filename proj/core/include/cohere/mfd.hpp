#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "cohere/functional.hpp"
#include "cohere/fv.hpp"
#include "cohere/polymesh.hpp"
#include "cohere/problem.hpp"
#include "cohere/sparse.hpp"

namespace cohere {

// The face-flux space W_h: one value per face in the canonical direction
// (the normal stored on the face, outward from cell_in). Continuity across
// internal faces holds structurally.
struct FaceFluxDOF {
  MeshHandle mesh;
  std::vector<double> values;

  explicit FaceFluxDOF(MeshHandle m)
      : mesh(std::move(m)), values(mesh->mesh.num_faces(), 0.0) {}
  FaceFluxDOF(MeshHandle m, std::vector<double> v)
      : mesh(std::move(m)), values(std::move(v)) {}

  // phi_{K,e}: the flux through e outward from cell k.
  double from_cell(int k, int e) const { return mesh->mesh.face_sign(k, e) * values[e]; }
};

// (div_h p)_K = (1/|K|) sum_{e in dK} phi_{K,e} |e|.
CellField mfd_div(const FaceFluxDOF& p);

// (I q)_{K,e} = face average of q.n, by face-midpoint quadrature.
FaceFluxDOF mfd_interpolate_flux(const VectorField& q, const MeshHandle& mesh);

// || I(div q) - div_h(I q) ||_inf given the analytic divergence of q;
// zero (to quadrature roundoff) for affine q.
double div_commutation_defect(const VectorField& q, const ScalarField& div_q,
                              const MeshHandle& mesh);

enum class InnerProductMode { Rt0Lifting, DiagonalTpfa };

// Cell-by-cell inner products on W_h built from a lifting of face fluxes,
// plus the assembled global Gram matrix.
struct CellInnerProduct {
  MeshHandle mesh;
  InnerProductMode mode;
  std::vector<Mat> alpha_inv;                           // per cell, at x_K
  std::vector<std::vector<std::vector<double>>> local;  // per-cell dense blocks
  SparseMatrix gram;                                    // faces x faces
};

// rt0-lifting: [p,q]_K = int_K alpha^-1 (lift p).(lift q), exact quadrature
// on simplicial and axis-aligned rectangular cells. diagonal-tpfa:
// [p,q]_K = sum_e alpha_K^-1 p_{K,e} q_{K,e} |e| d_{K,e} (scalar alpha).
CellInnerProduct build_inner_product(const MeshHandle& mesh, const Diffusivity& alpha,
                                     InnerProductMode mode);

// The mode's lifting R_K evaluated at x; local_p holds the outward normal
// traces indexed like cell_faces(k). Throws on unsupported cell shapes.
Vec ip_lift(const CellInnerProduct& ip, int k, const std::vector<double>& local_p, const Vec& x);

// Defects of the three lifting consistency conditions on cell k, probed
// with seeded random data: normal trace reproduction at face quadrature
// points, div(lift) = div_K via a boundary integral, and reproduction of
// interpolated constant fields.
struct LiftingCheck {
  double trace = 0.0;
  double divergence = 0.0;
  double constant = 0.0;
};
LiftingCheck lifting_consistency(const CellInnerProduct& ip, int k, std::uint64_t seed);

// Saddle blocks of the discrete mixed problem:
//   [M  B^T][p]   [0      ]        B[K][e] = sign |e|,
//   [B   0 ][u] = [-If |K|]        M = W_h Gram matrix.
SaddleSystem mfd_assemble(const CellInnerProduct& ip, const CellField& If);

struct MixedState {
  CellField u;
  FaceFluxDOF p;

  explicit MixedState(MeshHandle m) : u(m), p(std::move(m)) {}
};

MixedState mfd_solve(const MeshHandle& mesh, const Diffusivity& alpha, const ScalarField& f,
                     InnerProductMode mode, double tol = 1e-12,
                     CellQuadrature quad = CellQuadrature::Midpoint);

// |[F_h u, p]_{W_h} + [u, div_h p]_{M_h}| (relative), with F_h u obtained
// by the inner solve M (F_h u) = -B^T u.
double adjointness_defect(const FaceFluxDOF& p, const CellField& u, const CellInnerProduct& ip);

// Block layout of MixedState DOF vectors: all cell values, then all faces.
std::vector<double> pack_state(const MixedState& s);
MixedState unpack_state(const MeshHandle& mesh, const std::vector<double>& x);

// H_h(u,p) = [p, F_h u]_{W_h} - 1/2 [p,p]_{W_h} - [u, I f]_{M_h} over the
// (u,p) block space; the first pairing is evaluated as -[u, div_h p]_{M_h}
// via adjointness, so no inner solve appears in eval or gradient.
DiscreteFunctional mfd_hamiltonian(std::shared_ptr<const CellInnerProduct> ip, CellField If);
DiscreteFunctional mfd_hamiltonian(const MeshHandle& mesh, const Diffusivity& alpha,
                                   const ScalarField& f, InnerProductMode mode,
                                   CellQuadrature quad = CellQuadrature::Midpoint);

// The differential embedding: block residual of the saddle system,
// assembled from div_h and its adjoint directly.
std::function<std::vector<double>(const std::vector<double>&)> mfd_block_residual(
    std::shared_ptr<const CellInnerProduct> ip, CellField If);

// All-ones scaling: the Hamiltonian gradient equals the block residual as is.
std::vector<double> mfd_coherence_mass(const MeshHandle& mesh);

void write_mixed_cells_csv(std::ostream& out, const MixedState& s);
void write_mixed_faces_csv(std::ostream& out, const MixedState& s);

}  // namespace cohere
