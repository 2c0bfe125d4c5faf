#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cohere/vec.hpp"

namespace cohere {

// One face of a polytopal mesh. In 1D a face is a point (measure 1 by
// convention), in 2D an edge. The stored normal points outward from
// cell_in; the side with the lowest cell index is the canonical one.
struct Face {
  double measure = 0.0;
  Vec center;
  Vec normal;      // unit, outward from cell_in
  int cell_in = -1;   // canonical incident cell
  int cell_out = -1;  // second incident cell, -1 on the boundary
  std::array<int, 2> verts{-1, -1};
  int num_verts = 0;

  bool boundary() const { return cell_out < 0; }
};

// Polytopal mesh of a 1D or 2D domain: disjoint intervals, or simple
// polygons given CCW. Faces are built by edge matching at construction.
class PolyMesh {
 public:
  // Throws std::invalid_argument on degenerate cells, inconsistent
  // orientation or non-conformal input (an edge shared by >2 cells).
  static PolyMesh build(int dim, std::vector<Vec> vertices,
                        std::vector<std::vector<int>> cells);

  int dim() const { return dim_; }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_boundary_faces() const { return num_boundary_; }

  const Vec& vertex(int v) const { return vertices_[v]; }
  const std::vector<int>& cell_vertices(int k) const { return cells_[k]; }
  const Face& face(int e) const { return faces_[e]; }
  const std::vector<int>& cell_faces(int k) const { return cell_faces_[k]; }

  double cell_measure(int k) const { return cell_measure_[k]; }
  const Vec& cell_centroid(int k) const { return cell_centroid_[k]; }
  double total_measure() const;

  // +1 if k is the canonical side of face e, -1 otherwise.
  double face_sign(int k, int e) const { return faces_[e].cell_in == k ? 1.0 : -1.0; }
  // Unit normal of face e outward from cell k.
  Vec outward_normal(int k, int e) const { return face_sign(k, e) * faces_[e].normal; }

 private:
  int dim_ = 0;
  int num_boundary_ = 0;
  std::vector<Vec> vertices_;
  std::vector<std::vector<int>> cells_;
  std::vector<Face> faces_;
  std::vector<double> cell_measure_;
  std::vector<Vec> cell_centroid_;
  std::vector<std::vector<int>> cell_faces_;
};

// Mesh plus a center per cell and per boundary face, with the face
// distances d_e needed by two-point flux schemes.
struct CenteredMesh {
  PolyMesh mesh;
  std::vector<Vec> cell_center;                // one per cell
  std::vector<std::optional<Vec>> face_center; // boundary-face centers (by face id)
  std::vector<double> d_e;                     // per face
  std::vector<double> d_in, d_out;             // center-to-face distance per side
  bool admissible = false;
};

using MeshHandle = std::shared_ptr<const CenteredMesh>;

struct AdmissibilityViolation {
  int face;
  double angle_defect;  // radians
};

struct AdmissibilityResult {
  std::optional<CenteredMesh> mesh;
  std::vector<AdmissibilityViolation> violations;
  bool ok() const { return mesh.has_value(); }
};

// As check_admissibility below, but always returns the CenteredMesh; its
// admissible flag records whether the orthogonality check passed.
AdmissibilityResult build_centered(const PolyMesh& mesh,
                                   const std::vector<Vec>& cell_centers,
                                   const std::vector<Vec>& boundary_face_centers,
                                   double angle_tol = 1e-10);

// Verifies the orthogonality conditions between centers and faces.
// Throws std::invalid_argument when a center lies outside its cell or
// two centers across a face coincide.
AdmissibilityResult check_admissibility(const PolyMesh& mesh,
                                        const std::vector<Vec>& cell_centers,
                                        const std::vector<Vec>& boundary_face_centers,
                                        double angle_tol = 1e-10);

// Centroid cell centers, midpoint boundary-face centers; throws if the
// result is not admissible.
MeshHandle make_centered(const PolyMesh& mesh);
// Same centers, but keeps the mesh even when inadmissible (for schemes
// that do not need the orthogonality condition, e.g. rt0 inner products).
MeshHandle make_centered_unchecked(const PolyMesh& mesh);

// --- builders -------------------------------------------------------------

// 1D mesh from sorted breakpoints (cells are the consecutive intervals).
PolyMesh interval_mesh(const std::vector<double>& breakpoints);
PolyMesh uniform_interval_mesh(int n);
// nx x ny axis-aligned rectangles on [0,1]^2.
PolyMesh cartesian_mesh(int nx, int ny);
// n x n squares on [0,1]^2, each split into two triangles.
PolyMesh triangle_mesh(int n);

// --- text format ----------------------------------------------------------

struct MeshFile {
  int dim = 0;
  std::vector<Vec> vertices;
  std::vector<std::vector<int>> cells;
  std::vector<Vec> centers;  // optional: cells first, then boundary faces
};

MeshFile read_mesh_text(std::istream& in);
void write_mesh_text(std::ostream& out, const PolyMesh& mesh,
                     const CenteredMesh* centered = nullptr);

}  // namespace cohere
