#include "cohere/functional.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "cohere/sparse.hpp"

namespace cohere {

std::string to_string(SpaceTag tag) {
  switch (tag) {
    case SpaceTag::FdNodal: return "fd-nodal";
    case SpaceTag::FemNodal: return "fem-nodal";
    case SpaceTag::FvCell: return "fv-cell";
    case SpaceTag::MfdBlock: return "mfd-block";
  }
  return "?";
}

const std::vector<double>& DiscreteFunctional::check(const DOFVector& u) const {
  if (u.tag != tag)
    throw std::invalid_argument("DiscreteFunctional: space mismatch (" + to_string(u.tag) +
                                " vs " + to_string(tag) + ")");
  if (u.size() != dim) throw std::invalid_argument("DiscreteFunctional: dimension mismatch");
  return u.x;
}

double DiscreteFunctional::gateaux(const DOFVector& u, const DOFVector& v) const {
  return dot(gradient(check(u)), check(v));
}

double gateaux_fd_check(const DiscreteFunctional& F, const DOFVector& u, const DOFVector& v) {
  const std::vector<double>& ux = F.check(u);
  const std::vector<double>& vx = F.check(v);
  double analytic = dot(F.gradient(ux), vx);
  double best = std::numeric_limits<double>::infinity();
  for (double eps : {1e-4, 1e-5, 1e-6}) {
    std::vector<double> up(ux), um(ux);
    for (std::size_t i = 0; i < ux.size(); ++i) {
      up[i] += eps * vx[i];
      um[i] -= eps * vx[i];
    }
    double fd = (F.eval(up) - F.eval(um)) / (2.0 * eps);
    best = std::min(best, std::abs(fd - analytic) / (1.0 + std::abs(analytic)));
  }
  return best;
}

DOFVector find_extremal(const DiscreteFunctional& F, const DOFVector& u0,
                        double tol, std::size_t max_iter) {
  std::vector<double> u = F.check(u0);
  const std::size_t n = u.size();
  std::vector<double> g = F.gradient(u);
  double target = tol * (1.0 + norm_inf(g));
  if (norm_inf(g) <= target) return {F.tag, u};

  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];

  for (std::size_t it = 0; it < max_iter; ++it) {
    double alpha;
    if (F.quadratic) {
      // gradient is affine: H d = grad(u + d) - grad(u)
      std::vector<double> upd(u);
      for (std::size_t i = 0; i < n; ++i) upd[i] += d[i];
      std::vector<double> hd = F.gradient(upd);
      for (std::size_t i = 0; i < n; ++i) hd[i] -= g[i];
      double dhd = dot(d, hd);
      if (dhd <= 0.0)
        throw ExtremalFailure("find_extremal: non-positive curvature on quadratic functional",
                              {F.tag, u}, norm_inf(g));
      alpha = -dot(g, d) / dhd;
    } else {
      double slope = dot(g, d);
      if (slope >= 0.0) {  // not a descent direction, restart
        for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
        slope = dot(g, d);
      }
      double phi0 = F.eval(u);
      alpha = 1.0;
      std::vector<double> trial(n);
      int back = 0;
      for (; back < 60; ++back) {
        for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + alpha * d[i];
        if (F.eval(trial) <= phi0 + 1e-4 * alpha * slope) break;
        alpha *= 0.5;
      }
      if (back == 60)
        throw ExtremalFailure("find_extremal: line search failed", {F.tag, u}, norm_inf(g));
    }
    for (std::size_t i = 0; i < n; ++i) u[i] += alpha * d[i];
    std::vector<double> gn = F.gradient(u);
    if (norm_inf(gn) <= target) return {F.tag, u};
    double beta = 0.0;
    double gg = dot(g, g);
    if (gg > 0.0) {
      double num = dot(gn, gn) - dot(gn, g);  // Polak-Ribiere
      beta = std::max(0.0, num / gg);
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = -gn[i] + beta * d[i];
    g = std::move(gn);
  }
  throw ExtremalFailure("find_extremal: iteration limit reached", {F.tag, u}, norm_inf(g));
}

std::string CoherenceReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"scheme\":\"" << scheme << "\",\"mesh\":\"" << mesh << "\",\"probes\":" << probes
     << ",\"max_abs\":" << max_abs << ",\"max_rel\":" << max_rel << ",\"tol\":" << tol
     << ",\"pass\":" << (pass ? "true" : "false") << "}";
  return os.str();
}

CoherenceReport coherence_check(
    const DiscreteFunctional& variational,
    const std::function<std::vector<double>(const std::vector<double>&)>& residual,
    const std::vector<double>& mass, int probes, std::uint64_t seed,
    double tol, const std::string& scheme, const std::string& mesh) {
  if (mass.size() != variational.dim)
    throw std::invalid_argument("coherence_check: mass vector dimension mismatch");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  CoherenceReport rep;
  rep.scheme = scheme;
  rep.mesh = mesh;
  rep.probes = probes;
  rep.tol = tol;

  for (int p = 0; p < probes; ++p) {
    std::vector<double> u(variational.dim);
    for (double& x : u) x = unif(rng);
    std::vector<double> grad = variational.gradient(u);
    std::vector<double> res = residual(u);
    if (res.size() != variational.dim)
      throw std::invalid_argument("coherence_check: residual dimension mismatch");
    double abs = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      abs = std::max(abs, std::abs(grad[i] - mass[i] * res[i]));
      scale = std::max(scale, std::abs(grad[i]));
    }
    rep.max_abs = std::max(rep.max_abs, abs);
    rep.max_rel = std::max(rep.max_rel, scale > 0.0 ? abs / scale : 0.0);
  }
  rep.pass = rep.max_rel <= tol;
  return rep;
}

}  // namespace cohere
