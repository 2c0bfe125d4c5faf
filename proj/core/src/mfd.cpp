#include "cohere/mfd.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

namespace cohere {

CellField mfd_div(const FaceFluxDOF& p) {
  const PolyMesh& mesh = p.mesh->mesh;
  CellField out(p.mesh);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    double s = 0.0;
    for (int e : mesh.cell_faces(k)) s += p.from_cell(k, e) * mesh.face(e).measure;
    out.values[k] = s / mesh.cell_measure(k);
  }
  return out;
}

FaceFluxDOF mfd_interpolate_flux(const VectorField& q, const MeshHandle& mesh) {
  FaceFluxDOF p(mesh);
  for (int e = 0; e < mesh->mesh.num_faces(); ++e) {
    const Face& f = mesh->mesh.face(e);
    p.values[e] = q(f.center).dot(f.normal);
  }
  return p;
}

double div_commutation_defect(const VectorField& q, const ScalarField& div_q,
                              const MeshHandle& mesh) {
  CellField lhs = fv_interpolate(div_q, mesh);
  CellField rhs = mfd_div(mfd_interpolate_flux(q, mesh));
  double d = 0.0;
  for (std::size_t k = 0; k < lhs.values.size(); ++k)
    d = std::max(d, std::abs(lhs.values[k] - rhs.values[k]));
  return d;
}

namespace {

enum class CellShape { Simplex, Rectangle, Unsupported };

// Per-cell geometry for the rt0 lifting basis.
struct CellGeom {
  CellShape shape = CellShape::Unsupported;
  std::vector<Vec> v_opp;      // simplex: vertex opposite each local face
  std::vector<Vec> x_opp;      // rectangle: center of the opposite face
  std::vector<double> span;    // rectangle: distance between the face pair
};

CellGeom classify_cell(const PolyMesh& mesh, int k) {
  const auto& cf = mesh.cell_faces(k);
  const auto& cv = mesh.cell_vertices(k);
  CellGeom g;
  if (static_cast<int>(cv.size()) == mesh.dim() + 1) {
    g.shape = CellShape::Simplex;
    for (int e : cf) {
      const Face& f = mesh.face(e);
      int opp = -1;
      for (int v : cv) {
        bool on_face = false;
        for (int i = 0; i < f.num_verts; ++i)
          if (f.verts[i] == v) on_face = true;
        if (!on_face) opp = v;
      }
      g.v_opp.push_back(mesh.vertex(opp));
    }
    return g;
  }
  if (mesh.dim() == 2 && cv.size() == 4 && cf.size() == 4) {
    for (int e : cf) {
      Vec n = mesh.outward_normal(k, e);
      if (std::abs(std::abs(n[0]) - 1.0) > 1e-12 && std::abs(std::abs(n[1]) - 1.0) > 1e-12)
        return g;  // not axis-aligned
    }
    g.shape = CellShape::Rectangle;
    for (int e : cf) {
      Vec n = mesh.outward_normal(k, e);
      int opp = -1;
      for (int e2 : cf)
        if (mesh.outward_normal(k, e2).dot(n) < -0.5) opp = e2;
      g.x_opp.push_back(mesh.face(opp).center);
      g.span.push_back((mesh.face(e).center - mesh.face(opp).center).dot(n));
    }
    return g;
  }
  return g;
}

// rt0 basis function of local face a, outward-normalized for cell k.
Vec rt0_basis(const PolyMesh& mesh, int k, const CellGeom& geom, int a, const Vec& x) {
  int e = mesh.cell_faces(k)[a];
  if (geom.shape == CellShape::Simplex) {
    double c = mesh.face(e).measure / (mesh.dim() * mesh.cell_measure(k));
    return c * (x - geom.v_opp[a]);
  }
  Vec n = mesh.outward_normal(k, e);
  return ((x - geom.x_opp[a]).dot(n) / geom.span[a]) * n;
}

// Exact-for-degree-2 quadrature on the supported shapes.
void cell_quadrature(const PolyMesh& mesh, int k, CellShape shape,
                     std::vector<Vec>& pts, std::vector<double>& wts) {
  const auto& cv = mesh.cell_vertices(k);
  const double r = 0.5 / std::sqrt(3.0);
  pts.clear();
  wts.clear();
  if (mesh.dim() == 1) {
    const Vec& pa = mesh.vertex(cv[0]);
    const Vec& pb = mesh.vertex(cv[1]);
    for (double t : {0.5 - r, 0.5 + r}) {
      pts.push_back((1.0 - t) * pa + t * pb);
      wts.push_back(0.5 * mesh.cell_measure(k));
    }
  } else if (shape == CellShape::Simplex) {
    for (int i = 0; i < 3; ++i)
      pts.push_back(0.5 * (mesh.vertex(cv[i]) + mesh.vertex(cv[(i + 1) % 3])));
    wts.assign(3, mesh.cell_measure(k) / 3.0);
  } else {
    double x0 = mesh.vertex(cv[0])[0], x1 = x0, y0 = mesh.vertex(cv[0])[1], y1 = y0;
    for (int v : cv) {
      x0 = std::min(x0, mesh.vertex(v)[0]);
      x1 = std::max(x1, mesh.vertex(v)[0]);
      y0 = std::min(y0, mesh.vertex(v)[1]);
      y1 = std::max(y1, mesh.vertex(v)[1]);
    }
    for (double tx : {0.5 - r, 0.5 + r})
      for (double ty : {0.5 - r, 0.5 + r}) {
        pts.push_back(Vec(x0 + tx * (x1 - x0), y0 + ty * (y1 - y0)));
        wts.push_back(0.25 * mesh.cell_measure(k));
      }
  }
}

// Half-cell distance d_{K,e} for the diagonal inner product.
double side_distance(const CenteredMesh& cm, int k, int e) {
  const Face& f = cm.mesh.face(e);
  return f.cell_in == k ? cm.d_in[e] : cm.d_out[e];
}

}  // namespace

CellInnerProduct build_inner_product(const MeshHandle& mesh, const Diffusivity& alpha,
                                     InnerProductMode mode) {
  const CenteredMesh& cm = *mesh;
  const PolyMesh& m = cm.mesh;
  CellInnerProduct ip;
  ip.mesh = mesh;
  ip.mode = mode;
  ip.gram = SparseMatrix(m.num_faces(), m.num_faces());

  for (int k = 0; k < m.num_cells(); ++k) {
    Mat ai = alpha.at(cm.cell_center[k]).inverse();
    ip.alpha_inv.push_back(ai);
    const auto& cf = m.cell_faces(k);
    const std::size_t nf = cf.size();
    std::vector<std::vector<double>> mk(nf, std::vector<double>(nf, 0.0));

    if (mode == InnerProductMode::DiagonalTpfa) {
      if (!alpha.scalar)
        throw std::invalid_argument("build_inner_product: diagonal-tpfa needs scalar alpha");
      for (std::size_t a = 0; a < nf; ++a)
        mk[a][a] = ai(0, 0) * m.face(cf[a]).measure * side_distance(cm, k, cf[a]);
    } else {
      CellGeom geom = classify_cell(m, k);
      if (geom.shape == CellShape::Unsupported)
        throw std::invalid_argument("build_inner_product: rt0-lifting needs simplicial or "
                                    "axis-aligned rectangular cells");
      std::vector<Vec> pts;
      std::vector<double> wts;
      cell_quadrature(m, k, geom.shape, pts, wts);
      for (std::size_t q = 0; q < pts.size(); ++q) {
        std::vector<Vec> psi(nf);
        for (std::size_t a = 0; a < nf; ++a)
          psi[a] = rt0_basis(m, k, geom, static_cast<int>(a), pts[q]);
        for (std::size_t a = 0; a < nf; ++a) {
          Vec apa = ai.apply(psi[a]);
          for (std::size_t b = 0; b < nf; ++b) mk[a][b] += wts[q] * apa.dot(psi[b]);
        }
      }
    }

    for (std::size_t a = 0; a < nf; ++a)
      for (std::size_t b = 0; b < nf; ++b)
        if (mk[a][b] != 0.0)
          ip.gram.add(cf[a], cf[b], m.face_sign(k, cf[a]) * m.face_sign(k, cf[b]) * mk[a][b]);
    ip.local.push_back(std::move(mk));
  }
  ip.gram.finalize();
  ip.gram.set_symmetric(true);
  return ip;
}

Vec ip_lift(const CellInnerProduct& ip, int k, const std::vector<double>& local_p, const Vec& x) {
  const PolyMesh& m = ip.mesh->mesh;
  const auto& cf = m.cell_faces(k);
  if (local_p.size() != cf.size())
    throw std::invalid_argument("ip_lift: one trace per cell face required");

  if (ip.mode == InnerProductMode::Rt0Lifting) {
    CellGeom geom = classify_cell(m, k);
    if (geom.shape == CellShape::Unsupported)
      throw std::invalid_argument("ip_lift: unsupported cell shape for rt0-lifting");
    Vec r(m.dim());
    for (std::size_t a = 0; a < cf.size(); ++a)
      r += local_p[a] * rt0_basis(m, k, geom, static_cast<int>(a), x);
    return r;
  }

  // diagonal-tpfa: piecewise-constant per half cell in each axis direction
  // (intervals and axis-aligned rectangles only).
  if (m.dim() == 2) {
    CellGeom geom = classify_cell(m, k);
    if (geom.shape != CellShape::Rectangle)
      throw std::invalid_argument("ip_lift: diagonal-tpfa lifting needs rectangular cells");
  }
  Vec r(m.dim());
  for (int i = 0; i < m.dim(); ++i) {
    int best = -1;
    double dist = 0.0;
    for (std::size_t a = 0; a < cf.size(); ++a) {
      Vec n = m.outward_normal(k, cf[a]);
      if (std::abs(std::abs(n[i]) - 1.0) > 1e-12) continue;
      double d = std::abs(x[i] - m.face(cf[a]).center[i]);
      if (best < 0 || d < dist) {
        best = static_cast<int>(a);
        dist = d;
      }
    }
    r[i] = local_p[best] * m.outward_normal(k, cf[best])[i];
  }
  return r;
}

LiftingCheck lifting_consistency(const CellInnerProduct& ip, int k, std::uint64_t seed) {
  const PolyMesh& m = ip.mesh->mesh;
  const auto& cf = m.cell_faces(k);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double r = 0.5 / std::sqrt(3.0);

  auto face_points = [&](int e) {
    const Face& f = m.face(e);
    std::vector<Vec> pts{f.center};
    if (m.dim() == 2) {
      Vec t = m.vertex(f.verts[1]) - m.vertex(f.verts[0]);
      pts.push_back(f.center + r * t);
      pts.push_back(f.center - r * t);
    }
    return pts;
  };

  LiftingCheck out;
  std::vector<double> p(cf.size());
  for (double& v : p) v = unif(rng);

  // 1. normal trace reproduction at face quadrature points
  for (std::size_t a = 0; a < cf.size(); ++a) {
    Vec n = m.outward_normal(k, cf[a]);
    for (const Vec& x : face_points(cf[a]))
      out.trace = std::max(out.trace, std::abs(ip_lift(ip, k, p, x).dot(n) - p[a]));
  }

  // 2. div(lift) via boundary integral equals the flux balance
  double boundary = 0.0, direct = 0.0;
  for (std::size_t a = 0; a < cf.size(); ++a) {
    const Face& f = m.face(cf[a]);
    Vec n = m.outward_normal(k, cf[a]);
    auto pts = face_points(cf[a]);
    if (m.dim() == 1) {
      boundary += ip_lift(ip, k, p, pts[0]).dot(n);
    } else {
      // 2-point Gauss along the edge
      boundary += 0.5 * f.measure *
                  (ip_lift(ip, k, p, pts[1]).dot(n) + ip_lift(ip, k, p, pts[2]).dot(n));
    }
    direct += p[a] * f.measure;
  }
  out.divergence = std::abs(boundary - direct) / m.cell_measure(k);

  // 3. interpolated constant fields are reproduced
  Vec c(m.dim());
  for (int i = 0; i < m.dim(); ++i) c[i] = unif(rng);
  std::vector<double> pc(cf.size());
  for (std::size_t a = 0; a < cf.size(); ++a) pc[a] = c.dot(m.outward_normal(k, cf[a]));
  std::vector<Vec> samples{m.cell_centroid(k)};
  for (int v : m.cell_vertices(k))
    samples.push_back(0.5 * (m.cell_centroid(k) + m.vertex(v)));
  for (const Vec& x : samples) {
    Vec lx = ip_lift(ip, k, pc, x);
    for (int i = 0; i < m.dim(); ++i)
      out.constant = std::max(out.constant, std::abs(lx[i] - c[i]));
  }
  return out;
}

SaddleSystem mfd_assemble(const CellInnerProduct& ip, const CellField& If) {
  const PolyMesh& m = ip.mesh->mesh;
  SaddleSystem sys;
  sys.M = ip.gram;
  sys.B = SparseMatrix(m.num_cells(), m.num_faces());
  for (int k = 0; k < m.num_cells(); ++k)
    for (int e : m.cell_faces(k))
      sys.B.add(k, e, m.face_sign(k, e) * m.face(e).measure);
  sys.B.finalize();
  sys.rhs_u.resize(m.num_cells());
  for (int k = 0; k < m.num_cells(); ++k)
    sys.rhs_u[k] = -If.values[k] * m.cell_measure(k);
  return sys;
}

MixedState mfd_solve(const MeshHandle& mesh, const Diffusivity& alpha, const ScalarField& f,
                     InnerProductMode mode, double tol, CellQuadrature quad) {
  CellInnerProduct ip = build_inner_product(mesh, alpha, mode);
  CellField If = fv_interpolate(f, mesh, quad);
  SaddleSolution sol = saddle_solve(mfd_assemble(ip, If), tol);
  MixedState s(mesh);
  s.u.values = std::move(sol.u);
  s.p.values = std::move(sol.p);
  return s;
}

namespace {

// (B^T u)_e = |e| (u_in - u_out), with u_out = 0 across the boundary.
std::vector<double> div_adjoint(const PolyMesh& m, const std::vector<double>& u) {
  std::vector<double> bt(m.num_faces());
  for (int e = 0; e < m.num_faces(); ++e) {
    const Face& f = m.face(e);
    double du = u[f.cell_in] - (f.boundary() ? 0.0 : u[f.cell_out]);
    bt[e] = f.measure * du;
  }
  return bt;
}

// (B p)_K = sum_e sign |e| p_e = |K| (div_h p)_K.
std::vector<double> apply_b(const PolyMesh& m, const std::vector<double>& p) {
  std::vector<double> bp(m.num_cells(), 0.0);
  for (int k = 0; k < m.num_cells(); ++k)
    for (int e : m.cell_faces(k))
      bp[k] += m.face_sign(k, e) * m.face(e).measure * p[e];
  return bp;
}

}  // namespace

double adjointness_defect(const FaceFluxDOF& p, const CellField& u, const CellInnerProduct& ip) {
  const PolyMesh& m = ip.mesh->mesh;
  std::vector<double> rhs = div_adjoint(m, u.values);
  for (double& v : rhs) v = -v;
  std::vector<double> fh = cg_solve(ip.gram, rhs, 1e-13);  // F_h u
  double a = dot(fh, ip.gram.apply(p.values));
  CellField dp = mfd_div(p);
  double b = 0.0;
  for (int k = 0; k < m.num_cells(); ++k)
    b += u.values[k] * dp.values[k] * m.cell_measure(k);
  return std::abs(a + b) / std::max({1.0, std::abs(a), std::abs(b)});
}

std::vector<double> pack_state(const MixedState& s) {
  std::vector<double> x = s.u.values;
  x.insert(x.end(), s.p.values.begin(), s.p.values.end());
  return x;
}

MixedState unpack_state(const MeshHandle& mesh, const std::vector<double>& x) {
  const PolyMesh& m = mesh->mesh;
  if (x.size() != static_cast<std::size_t>(m.num_cells() + m.num_faces()))
    throw std::invalid_argument("unpack_state: dimension mismatch");
  MixedState s(mesh);
  std::copy(x.begin(), x.begin() + m.num_cells(), s.u.values.begin());
  std::copy(x.begin() + m.num_cells(), x.end(), s.p.values.begin());
  return s;
}

DiscreteFunctional mfd_hamiltonian(std::shared_ptr<const CellInnerProduct> ip, CellField If) {
  MeshHandle mesh = ip->mesh;
  const std::size_t nc = mesh->mesh.num_cells();
  const std::size_t nf = mesh->mesh.num_faces();
  auto load = std::make_shared<const std::vector<double>>(std::move(If.values));

  DiscreteFunctional F;
  F.tag = SpaceTag::MfdBlock;
  F.dim = nc + nf;
  F.quadratic = true;
  F.convex = false;  // saddle structure
  F.eval = [ip, load, mesh, nc, nf](const std::vector<double>& x) {
    const PolyMesh& m = mesh->mesh;
    std::vector<double> p(x.begin() + nc, x.end());
    std::vector<double> bp = apply_b(m, p);
    double s = 0.0;
    for (std::size_t k = 0; k < nc; ++k)
      s -= x[k] * (bp[k] + (*load)[k] * m.cell_measure(static_cast<int>(k)));
    s -= 0.5 * dot(p, ip->gram.apply(p));
    return s;
  };
  F.gradient = [ip, load, mesh, nc, nf](const std::vector<double>& x) {
    const PolyMesh& m = mesh->mesh;
    std::vector<double> u(x.begin(), x.begin() + nc);
    std::vector<double> p(x.begin() + nc, x.end());
    std::vector<double> g(nc + nf);
    std::vector<double> bp = apply_b(m, p);
    for (std::size_t k = 0; k < nc; ++k)
      g[k] = -bp[k] - (*load)[k] * m.cell_measure(static_cast<int>(k));
    std::vector<double> bt = div_adjoint(m, u);
    std::vector<double> mp = ip->gram.apply(p);
    for (std::size_t e = 0; e < nf; ++e) g[nc + e] = -bt[e] - mp[e];
    return g;
  };
  return F;
}

DiscreteFunctional mfd_hamiltonian(const MeshHandle& mesh, const Diffusivity& alpha,
                                   const ScalarField& f, InnerProductMode mode,
                                   CellQuadrature quad) {
  auto ip = std::make_shared<const CellInnerProduct>(build_inner_product(mesh, alpha, mode));
  return mfd_hamiltonian(std::move(ip), fv_interpolate(f, mesh, quad));
}

std::function<std::vector<double>(const std::vector<double>&)> mfd_block_residual(
    std::shared_ptr<const CellInnerProduct> ip, CellField If) {
  MeshHandle mesh = ip->mesh;
  auto load = std::make_shared<const std::vector<double>>(std::move(If.values));
  return [ip, load, mesh](const std::vector<double>& x) {
    const PolyMesh& m = mesh->mesh;
    MixedState s = unpack_state(mesh, x);
    CellField dp = mfd_div(s.p);
    std::vector<double> r(x.size());
    for (int k = 0; k < m.num_cells(); ++k)
      r[k] = -m.cell_measure(k) * (dp.values[k] + (*load)[k]);
    std::vector<double> bt = div_adjoint(m, s.u.values);
    std::vector<double> mp = ip->gram.apply(s.p.values);
    for (int e = 0; e < m.num_faces(); ++e) r[m.num_cells() + e] = -bt[e] - mp[e];
    return r;
  };
}

std::vector<double> mfd_coherence_mass(const MeshHandle& mesh) {
  return std::vector<double>(mesh->mesh.num_cells() + mesh->mesh.num_faces(), 1.0);
}

void write_mixed_cells_csv(std::ostream& out, const MixedState& s) {
  out << "cell_id,u\n";
  out.precision(17);
  for (std::size_t k = 0; k < s.u.values.size(); ++k) out << k << "," << s.u.values[k] << "\n";
}

void write_mixed_faces_csv(std::ostream& out, const MixedState& s) {
  out << "face_id,flux\n";
  out.precision(17);
  for (std::size_t e = 0; e < s.p.values.size(); ++e) out << e << "," << s.p.values[e] << "\n";
}

}  // namespace cohere
