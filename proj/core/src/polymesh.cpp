#include "cohere/polymesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cohere {

namespace {

struct ProtoFace {
  Face face;
};

bool lex_less(const Vec& a, const Vec& b) {
  for (int i = 0; i < a.dim(); ++i) {
    if (a[i] < b[i] - 1e-14) return true;
    if (a[i] > b[i] + 1e-14) return false;
  }
  return false;
}

// Two distinct boundary segments that are collinear and overlap indicate a
// hanging node (non-conformal input).
bool segments_overlap(const Vec& a1, const Vec& a2, const Vec& b1, const Vec& b2) {
  Vec da = a2 - a1;
  double len = da.norm();
  if (len == 0.0) return false;
  Vec t = (1.0 / len) * da;
  Vec n(-t[1], t[0]);
  double off1 = std::abs((b1 - a1).dot(n));
  double off2 = std::abs((b2 - a1).dot(n));
  if (off1 > 1e-12 * len || off2 > 1e-12 * len) return false;
  double s1 = (b1 - a1).dot(t), s2 = (b2 - a1).dot(t);
  double lo = std::min(s1, s2), hi = std::max(s1, s2);
  return std::min(hi, len) - std::max(lo, 0.0) > 1e-12 * len;
}

}  // namespace

PolyMesh PolyMesh::build(int dim, std::vector<Vec> vertices,
                         std::vector<std::vector<int>> cells) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("PolyMesh: dimension must be 1 or 2");
  PolyMesh m;
  m.dim_ = dim;
  m.vertices_ = std::move(vertices);
  m.cells_ = std::move(cells);
  const int nc = m.num_cells();
  if (nc == 0) throw std::invalid_argument("PolyMesh: empty cell list");
  m.cell_measure_.resize(nc);
  m.cell_centroid_.resize(nc);
  m.cell_faces_.assign(nc, {});

  std::vector<Face> faces;

  if (dim == 1) {
    for (int k = 0; k < nc; ++k) {
      const auto& cv = m.cells_[k];
      if (cv.size() != 2) throw std::invalid_argument("PolyMesh: 1D cells need two vertices");
      double a = m.vertices_[cv[0]][0], b = m.vertices_[cv[1]][0];
      if (b <= a) throw std::invalid_argument("PolyMesh: 1D cell with non-positive length");
      m.cell_measure_[k] = b - a;
      m.cell_centroid_[k] = Vec(0.5 * (a + b));
    }
    // Faces are the endpoints, matched by vertex index.
    std::map<int, std::vector<std::pair<int, double>>> incidence;  // vertex -> (cell, outward dir)
    for (int k = 0; k < nc; ++k) {
      incidence[m.cells_[k][0]].push_back({k, -1.0});
      incidence[m.cells_[k][1]].push_back({k, +1.0});
    }
    for (auto& [v, inc] : incidence) {
      if (inc.size() > 2) throw std::invalid_argument("PolyMesh: vertex shared by more than two 1D cells");
      std::sort(inc.begin(), inc.end());
      Face f;
      f.measure = 1.0;  // 1D faces are points
      f.center = m.vertices_[v];
      f.verts = {v, -1};
      f.num_verts = 1;
      f.cell_in = inc[0].first;
      f.normal = Vec(inc[0].second);
      if (inc.size() == 2) f.cell_out = inc[1].first;
      faces.push_back(f);
    }
  } else {
    struct EdgeUse {
      int cell;
      int a, b;  // as traversed (CCW)
    };
    std::map<std::pair<int, int>, std::vector<EdgeUse>> edges;
    for (int k = 0; k < nc; ++k) {
      const auto& cv = m.cells_[k];
      if (cv.size() < 3) throw std::invalid_argument("PolyMesh: 2D cells need at least three vertices");
      double area2 = 0.0;
      Vec centroid(2);
      for (std::size_t i = 0; i < cv.size(); ++i) {
        const Vec& p = m.vertices_[cv[i]];
        const Vec& q = m.vertices_[cv[(i + 1) % cv.size()]];
        double cross = p[0] * q[1] - q[0] * p[1];
        area2 += cross;
        centroid += cross * (p + q);
      }
      if (area2 < 0.0) throw std::invalid_argument("PolyMesh: cell " + std::to_string(k) + " is not CCW");
      double area = 0.5 * area2;
      if (area <= 1e-14) throw std::invalid_argument("PolyMesh: cell " + std::to_string(k) + " has zero area");
      m.cell_measure_[k] = area;
      m.cell_centroid_[k] = (1.0 / (6.0 * area)) * centroid;
      for (std::size_t i = 0; i < cv.size(); ++i) {
        int a = cv[i], b = cv[(i + 1) % cv.size()];
        edges[{std::min(a, b), std::max(a, b)}].push_back({k, a, b});
      }
    }
    for (auto& [key, uses] : edges) {
      if (uses.size() > 2)
        throw std::invalid_argument("PolyMesh: edge shared by more than two cells (non-conformal mesh)");
      if (uses.size() == 2 && uses[0].a == uses[1].a)
        throw std::invalid_argument("PolyMesh: inconsistent orientation across a shared edge");
      std::sort(uses.begin(), uses.end(), [](const EdgeUse& x, const EdgeUse& y) { return x.cell < y.cell; });
      const EdgeUse& u = uses[0];
      const Vec& pa = m.vertices_[u.a];
      const Vec& pb = m.vertices_[u.b];
      Vec t = pb - pa;
      double len = t.norm();
      if (len <= 1e-14) throw std::invalid_argument("PolyMesh: zero-length edge");
      Face f;
      f.measure = len;
      f.center = 0.5 * (pa + pb);
      f.normal = Vec(t[1] / len, -t[0] / len);  // outward for CCW traversal
      f.verts = {u.a, u.b};
      f.num_verts = 2;
      f.cell_in = u.cell;
      if (uses.size() == 2) f.cell_out = uses[1].cell;
      faces.push_back(f);
    }
    // Hanging-node detection between boundary edges.
    std::vector<int> bnd;
    for (std::size_t e = 0; e < faces.size(); ++e)
      if (faces[e].boundary()) bnd.push_back(static_cast<int>(e));
    for (std::size_t i = 0; i < bnd.size(); ++i)
      for (std::size_t j = i + 1; j < bnd.size(); ++j) {
        const Face& f1 = faces[bnd[i]];
        const Face& f2 = faces[bnd[j]];
        if (f1.cell_in != f2.cell_in &&
            segments_overlap(m.vertices_[f1.verts[0]], m.vertices_[f1.verts[1]],
                             m.vertices_[f2.verts[0]], m.vertices_[f2.verts[1]]))
          throw std::invalid_argument("PolyMesh: overlapping edges do not match vertex-to-vertex (non-conformal mesh)");
      }
  }

  // Deterministic face order: by canonical cell, then center position.
  std::sort(faces.begin(), faces.end(), [](const Face& x, const Face& y) {
    if (x.cell_in != y.cell_in) return x.cell_in < y.cell_in;
    return lex_less(x.center, y.center);
  });
  m.faces_ = std::move(faces);
  for (int e = 0; e < m.num_faces(); ++e) {
    const Face& f = m.faces_[e];
    m.cell_faces_[f.cell_in].push_back(e);
    if (!f.boundary()) m.cell_faces_[f.cell_out].push_back(e);
    if (f.boundary()) ++m.num_boundary_;
  }

  // Closed-polytope identity per cell.
  for (int k = 0; k < nc; ++k) {
    Vec s(dim);
    double perimeter = 0.0;
    for (int e : m.cell_faces_[k]) {
      s += m.faces_[e].measure * m.outward_normal(k, e);
      perimeter += m.faces_[e].measure;
    }
    if (s.norm() > 1e-12 * perimeter)
      throw std::invalid_argument("PolyMesh: cell " + std::to_string(k) + " is not closed");
  }
  return m;
}

double PolyMesh::total_measure() const {
  double s = 0.0;
  for (double v : cell_measure_) s += v;
  return s;
}

namespace {

bool point_in_cell(const PolyMesh& mesh, int k, const Vec& p) {
  if (mesh.dim() == 1) {
    double a = mesh.vertex(mesh.cell_vertices(k)[0])[0];
    double b = mesh.vertex(mesh.cell_vertices(k)[1])[0];
    return p[0] >= a - 1e-13 && p[0] <= b + 1e-13;
  }
  const auto& cv = mesh.cell_vertices(k);
  // On-boundary counts as inside.
  for (std::size_t i = 0; i < cv.size(); ++i) {
    const Vec& a = mesh.vertex(cv[i]);
    const Vec& b = mesh.vertex(cv[(i + 1) % cv.size()]);
    Vec d = b - a;
    double len2 = d.dot(d);
    double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
    if ((p - (a + t * d)).norm() < 1e-13) return true;
  }
  bool inside = false;
  for (std::size_t i = 0; i < cv.size(); ++i) {
    const Vec& a = mesh.vertex(cv[i]);
    const Vec& b = mesh.vertex(cv[(i + 1) % cv.size()]);
    if ((a[1] > p[1]) != (b[1] > p[1])) {
      double xint = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
      if (p[0] < xint) inside = !inside;
    }
  }
  return inside;
}

double angle_to_normal(const Vec& seg, const Vec& n) {
  double len = seg.norm();
  if (len == 0.0) return 0.0;
  double along = seg.dot(n);
  Vec tang = seg - along * n;
  return std::atan2(tang.norm(), std::abs(along));
}

}  // namespace

AdmissibilityResult build_centered(const PolyMesh& mesh,
                                   const std::vector<Vec>& cell_centers,
                                   const std::vector<Vec>& boundary_face_centers,
                                   double angle_tol) {
  if (static_cast<int>(cell_centers.size()) != mesh.num_cells())
    throw std::invalid_argument("check_admissibility: one center per cell required");
  if (static_cast<int>(boundary_face_centers.size()) != mesh.num_boundary_faces())
    throw std::invalid_argument("check_admissibility: one center per boundary face required");

  for (int k = 0; k < mesh.num_cells(); ++k)
    if (!point_in_cell(mesh, k, cell_centers[k]))
      throw std::invalid_argument("check_admissibility: center of cell " + std::to_string(k) +
                                  " lies outside the cell");

  CenteredMesh cm;
  cm.mesh = mesh;
  cm.cell_center = cell_centers;
  cm.face_center.assign(mesh.num_faces(), std::nullopt);
  cm.d_e.assign(mesh.num_faces(), 0.0);
  cm.d_in.assign(mesh.num_faces(), 0.0);
  cm.d_out.assign(mesh.num_faces(), 0.0);

  std::vector<AdmissibilityViolation> violations;
  int b = 0;
  for (int e = 0; e < mesh.num_faces(); ++e) {
    const Face& f = mesh.face(e);
    if (f.boundary()) {
      const Vec& xe = boundary_face_centers[b++];
      Vec seg = xe - cell_centers[f.cell_in];
      double d = seg.norm();
      if (d == 0.0)
        throw std::invalid_argument("check_admissibility: coincident centers at face " + std::to_string(e));
      cm.face_center[e] = xe;
      cm.d_e[e] = d;
      cm.d_in[e] = std::abs((cell_centers[f.cell_in] - f.center).dot(f.normal));
      double defect = angle_to_normal(seg, f.normal);
      if (defect > angle_tol) violations.push_back({e, defect});
    } else {
      Vec seg = cell_centers[f.cell_out] - cell_centers[f.cell_in];
      double d = seg.norm();
      if (d == 0.0)
        throw std::invalid_argument("check_admissibility: coincident centers across face " + std::to_string(e));
      cm.d_e[e] = d;
      cm.d_in[e] = std::abs((cell_centers[f.cell_in] - f.center).dot(f.normal));
      cm.d_out[e] = std::abs((cell_centers[f.cell_out] - f.center).dot(f.normal));
      double defect = angle_to_normal(seg, f.normal);
      if (defect > angle_tol) violations.push_back({e, defect});
    }
  }

  AdmissibilityResult res;
  res.violations = std::move(violations);
  cm.admissible = res.violations.empty();
  res.mesh = std::move(cm);
  return res;
}

AdmissibilityResult check_admissibility(const PolyMesh& mesh,
                                        const std::vector<Vec>& cell_centers,
                                        const std::vector<Vec>& boundary_face_centers,
                                        double angle_tol) {
  AdmissibilityResult res = build_centered(mesh, cell_centers, boundary_face_centers, angle_tol);
  if (!res.violations.empty()) res.mesh.reset();
  return res;
}

namespace {

AdmissibilityResult centroid_centered(const PolyMesh& mesh) {
  std::vector<Vec> centers;
  centers.reserve(mesh.num_cells());
  for (int k = 0; k < mesh.num_cells(); ++k) centers.push_back(mesh.cell_centroid(k));
  std::vector<Vec> bnd;
  for (int e = 0; e < mesh.num_faces(); ++e)
    if (mesh.face(e).boundary()) bnd.push_back(mesh.face(e).center);
  return build_centered(mesh, centers, bnd, 1e-10);
}

}  // namespace

MeshHandle make_centered(const PolyMesh& mesh) {
  auto res = centroid_centered(mesh);
  if (!res.mesh->admissible)
    throw std::runtime_error("make_centered: mesh is not admissible with centroid centers (" +
                             std::to_string(res.violations.size()) + " faces violate orthogonality)");
  return std::make_shared<const CenteredMesh>(std::move(*res.mesh));
}

MeshHandle make_centered_unchecked(const PolyMesh& mesh) {
  auto res = centroid_centered(mesh);
  return std::make_shared<const CenteredMesh>(std::move(*res.mesh));
}

PolyMesh interval_mesh(const std::vector<double>& breakpoints) {
  if (breakpoints.size() < 2) throw std::invalid_argument("interval_mesh: need at least two breakpoints");
  std::vector<Vec> verts;
  for (double x : breakpoints) verts.push_back(Vec(x));
  std::vector<std::vector<int>> cells;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    cells.push_back({static_cast<int>(i), static_cast<int>(i + 1)});
  return PolyMesh::build(1, std::move(verts), std::move(cells));
}

PolyMesh uniform_interval_mesh(int n) {
  std::vector<double> bp(n + 1);
  for (int i = 0; i <= n; ++i) bp[i] = static_cast<double>(i) / n;
  return interval_mesh(bp);
}

PolyMesh cartesian_mesh(int nx, int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("cartesian_mesh: need positive subdivisions");
  std::vector<Vec> verts;
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      verts.push_back(Vec(static_cast<double>(i) / nx, static_cast<double>(j) / ny));
  std::vector<std::vector<int>> cells;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
  return PolyMesh::build(2, std::move(verts), std::move(cells));
}

PolyMesh triangle_mesh(int n) {
  if (n < 1) throw std::invalid_argument("triangle_mesh: need positive subdivisions");
  std::vector<Vec> verts;
  auto vid = [&](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      verts.push_back(Vec(static_cast<double>(i) / n, static_cast<double>(j) / n));
  std::vector<std::vector<int>> cells;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      cells.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  return PolyMesh::build(2, std::move(verts), std::move(cells));
}

MeshFile read_mesh_text(std::istream& in) {
  MeshFile mf;
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  std::size_t pos = 0;
  auto next = [&]() -> std::string {
    if (pos >= tokens.size()) throw std::runtime_error("mesh file: unexpected end of input");
    return tokens[pos++];
  };
  auto next_int = [&]() { return std::stoi(next()); };
  auto next_double = [&]() { return std::stod(next()); };

  while (pos < tokens.size()) {
    std::string section = next();
    if (section == "vertices") {
      int count = next_int();
      if (count < 1) throw std::runtime_error("mesh file: empty vertex section");
      // Dimension is inferred from the first vertex line: tokens until the
      // line structure repeats. We require it explicitly instead: a vertex
      // line has dim coordinates, so peek for the cells keyword.
      std::vector<double> coords;
      while (pos < tokens.size() && tokens[pos] != "cells" && tokens[pos] != "centers")
        coords.push_back(next_double());
      if (coords.size() % count != 0) throw std::runtime_error("mesh file: malformed vertex section");
      int dim = static_cast<int>(coords.size() / count);
      if (dim != 1 && dim != 2) throw std::runtime_error("mesh file: vertices must be 1D or 2D");
      mf.dim = dim;
      for (int i = 0; i < count; ++i) {
        Vec v(dim);
        for (int c = 0; c < dim; ++c) v[c] = coords[i * dim + c];
        mf.vertices.push_back(v);
      }
    } else if (section == "cells") {
      int count = next_int();
      for (int i = 0; i < count; ++i) {
        int k = next_int();
        std::vector<int> cv(k);
        for (int c = 0; c < k; ++c) cv[c] = next_int();
        mf.cells.push_back(std::move(cv));
      }
    } else if (section == "centers") {
      while (pos < tokens.size()) {
        Vec v(mf.dim);
        for (int c = 0; c < mf.dim; ++c) v[c] = next_double();
        mf.centers.push_back(v);
      }
    } else {
      throw std::runtime_error("mesh file: unknown section '" + section + "'");
    }
  }
  if (mf.vertices.empty() || mf.cells.empty())
    throw std::runtime_error("mesh file: missing vertices or cells section");
  return mf;
}

void write_mesh_text(std::ostream& out, const PolyMesh& mesh, const CenteredMesh* centered) {
  out << "vertices " << mesh.num_vertices() << "\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    out << mesh.vertex(v)[0];
    if (mesh.dim() == 2) out << " " << mesh.vertex(v)[1];
    out << "\n";
  }
  out << "cells " << mesh.num_cells() << "\n";
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const auto& cv = mesh.cell_vertices(k);
    out << cv.size();
    for (int v : cv) out << " " << v;
    out << "\n";
  }
  if (centered) {
    out << "centers\n";
    auto emit = [&](const Vec& p) {
      out << p[0];
      if (mesh.dim() == 2) out << " " << p[1];
      out << "\n";
    };
    for (const Vec& p : centered->cell_center) emit(p);
    for (int e = 0; e < mesh.num_faces(); ++e)
      if (mesh.face(e).boundary()) emit(*centered->face_center[e]);
  }
}

}  // namespace cohere
