#include "cohere/fd.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

namespace cohere {

namespace {

double value_at(const NodalField& u, const MultiIndex& j) {
  return u.grid.in_range(j) ? u.values[u.grid.flatten(j)] : 0.0;
}

Vec vector_at(const NodalVectorField& p, const MultiIndex& j) {
  return p.grid.in_range(j) ? p.values[p.grid.flatten(j)] : Vec(p.grid.dim());
}

}  // namespace

void apply_boundary_mask(NodalField& u) {
  const CartesianGrid& g = u.grid;
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx)
    if (g.is_boundary(g.unflatten(idx))) u.values[idx] = 0.0;
}

bool satisfies_boundary_mask(const NodalField& u) {
  const CartesianGrid& g = u.grid;
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx)
    if (g.is_boundary(g.unflatten(idx)) && u.values[idx] != 0.0) return false;
  return true;
}

NodalVectorField grad_h(const NodalField& u, StencilPair pair) {
  const CartesianGrid& g = u.grid;
  const double h = g.spacing();
  NodalVectorField out(g);
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    MultiIndex j = g.unflatten(idx);
    Vec v(g.dim());
    for (int i = 0; i < g.dim(); ++i) {
      if (pair == StencilPair::ForwardBackward)
        v[i] = (value_at(u, CartesianGrid::shift_up(j, i)) - u.values[idx]) / h;
      else
        v[i] = (u.values[idx] - value_at(u, CartesianGrid::shift_down(j, i))) / h;
    }
    out.values[idx] = v;
  }
  return out;
}

NodalField div_h(const NodalVectorField& p, StencilPair pair) {
  const CartesianGrid& g = p.grid;
  const double h = g.spacing();
  NodalField out(g);
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    MultiIndex j = g.unflatten(idx);
    double s = 0.0;
    for (int i = 0; i < g.dim(); ++i) {
      if (pair == StencilPair::ForwardBackward)
        s += (p.values[idx][i] - vector_at(p, CartesianGrid::shift_down(j, i))[i]) / h;
      else
        s += (vector_at(p, CartesianGrid::shift_up(j, i))[i] - p.values[idx][i]) / h;
    }
    out.values[idx] = s;
  }
  return out;
}

double fd_green_gauss_defect(const NodalField& u, const NodalVectorField& p, StencilPair pair) {
  if (!satisfies_boundary_mask(u))
    throw std::invalid_argument("fd_green_gauss_defect: u must vanish on the boundary nodes");
  const CartesianGrid& g = u.grid;
  const double hd = std::pow(g.spacing(), g.dim());
  NodalVectorField gu = grad_h(u, pair);
  NodalField dp = div_h(p, pair);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    s1 += p.values[idx].dot(gu.values[idx]) * hd;
    s2 += dp.values[idx] * u.values[idx] * hd;
  }
  return std::abs(s1 + s2) / std::max({1.0, std::abs(s1), std::abs(s2)});
}

namespace {

// dL/dv evaluated at every node, with the field masked into V_h.
NodalVectorField momentum_field(const LagrangianFn& L, const NodalField& u, StencilPair pair) {
  const CartesianGrid& g = u.grid;
  NodalVectorField gu = grad_h(u, pair);
  NodalVectorField q(g);
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    MultiIndex j = g.unflatten(idx);
    q.values[idx] = L.dv(g.node(j), u.values[idx], gu.values[idx]);
  }
  return q;
}

}  // namespace

NodalField fd_el_residual(const LagrangianFn& L, const NodalField& u, StencilPair pair) {
  NodalField masked = u;
  apply_boundary_mask(masked);
  const CartesianGrid& g = u.grid;
  NodalVectorField gu = grad_h(masked, pair);
  NodalField divq = div_h(momentum_field(L, masked, pair), pair);
  NodalField res(g);
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    MultiIndex j = g.unflatten(idx);
    if (!g.is_interior(j)) continue;
    res.values[idx] = L.dy(g.node(j), masked.values[idx], gu.values[idx]) - divq.values[idx];
  }
  return res;
}

DiscreteFunctional fd_lagrangian(const LagrangianFn& L, const CartesianGrid& grid, StencilPair pair) {
  DiscreteFunctional F;
  F.tag = SpaceTag::FdNodal;
  F.dim = grid.num_nodes();
  F.quadratic = static_cast<bool>(L.poisson);
  F.convex = L.convex;
  F.eval = [L, grid, pair](const std::vector<double>& x) {
    NodalField u(grid, x);
    apply_boundary_mask(u);
    NodalVectorField gu = grad_h(u, pair);
    const double hd = std::pow(grid.spacing(), grid.dim());
    double s = 0.0;
    for (std::size_t idx = 0; idx < grid.num_nodes(); ++idx)
      s += L.eval(grid.node(grid.unflatten(idx)), u.values[idx], gu.values[idx]) * hd;
    return s;
  };
  F.gradient = [L, grid, pair](const std::vector<double>& x) {
    NodalField u(grid, x);
    apply_boundary_mask(u);
    NodalVectorField gu = grad_h(u, pair);
    NodalField divq = div_h(momentum_field(L, u, pair), pair);
    const double hd = std::pow(grid.spacing(), grid.dim());
    std::vector<double> g(grid.num_nodes(), 0.0);
    for (std::size_t idx = 0; idx < grid.num_nodes(); ++idx) {
      MultiIndex j = grid.unflatten(idx);
      if (grid.is_boundary(j)) continue;  // variations live in V_h
      g[idx] = hd * (L.dy(grid.node(j), u.values[idx], gu.values[idx]) - divq.values[idx]);
    }
    return g;
  };
  return F;
}

std::vector<double> fd_coherence_mass(const CartesianGrid& grid) {
  const double hd = std::pow(grid.spacing(), grid.dim());
  std::vector<double> m(grid.num_nodes(), 0.0);
  for (std::size_t idx = 0; idx < grid.num_nodes(); ++idx)
    if (grid.is_interior(grid.unflatten(idx))) m[idx] = hd;
  return m;
}

SparseMatrix fd_assemble_poisson(const Diffusivity& alpha, const CartesianGrid& grid, StencilPair pair) {
  const double h = grid.spacing();
  const int d = grid.dim();

  // interior numbering
  std::map<std::size_t, std::size_t> interior_id;
  for (std::size_t idx = 0; idx < grid.num_nodes(); ++idx)
    if (grid.is_interior(grid.unflatten(idx))) {
      std::size_t id = interior_id.size();
      interior_id[idx] = id;
    }

  SparseMatrix A(interior_id.size(), interior_id.size());
  auto add_row = [&](const MultiIndex& j, std::size_t col, double v) {
    if (!grid.in_range(j) || !grid.is_interior(j)) return;
    A.add(interior_id.at(grid.flatten(j)), col, v);
  };

  for (const auto& [kidx, col] : interior_id) {
    MultiIndex k = grid.unflatten(kidx);
    // Nodes m where grad_h(e_k) is nonzero, with the basis gradient there.
    std::vector<std::pair<MultiIndex, Vec>> support;
    {
      Vec gk(d);
      for (int i = 0; i < d; ++i) gk[i] = -1.0 / h;
      if (pair == StencilPair::BackwardForward)
        for (int i = 0; i < d; ++i) gk[i] = 1.0 / h;
      support.push_back({k, gk});
      for (int i = 0; i < d; ++i) {
        MultiIndex m = pair == StencilPair::ForwardBackward ? CartesianGrid::shift_down(k, i)
                                                            : CartesianGrid::shift_up(k, i);
        if (!grid.in_range(m)) continue;
        Vec gm(d);
        gm[i] = pair == StencilPair::ForwardBackward ? 1.0 / h : -1.0 / h;
        support.push_back({m, gm});
      }
    }
    for (const auto& [m, gm] : support) {
      Vec qm = alpha.at(grid.node(m)).apply(gm);
      // distribute -div_h of the momentum contribution at m
      for (int i = 0; i < d; ++i) {
        if (qm[i] == 0.0) continue;
        if (pair == StencilPair::ForwardBackward) {
          add_row(m, col, -qm[i] / h);
          add_row(CartesianGrid::shift_up(m, i), col, qm[i] / h);
        } else {
          add_row(CartesianGrid::shift_down(m, i), col, -qm[i] / h);
          add_row(m, col, qm[i] / h);
        }
      }
    }
  }
  A.finalize();
  A.set_symmetric(true);
  return A;
}

NodalField fd_solve(const LagrangianFn& L, const CartesianGrid& grid, double tol, StencilPair pair) {
  if (L.poisson) {
    SparseMatrix A = fd_assemble_poisson(L.poisson->alpha, grid, pair);
    std::vector<double> b;
    std::vector<std::size_t> interior;
    for (std::size_t idx = 0; idx < grid.num_nodes(); ++idx)
      if (grid.is_interior(grid.unflatten(idx))) {
        interior.push_back(idx);
        b.push_back(L.poisson->f(grid.node(grid.unflatten(idx))));
      }
    std::vector<double> x = cg_solve(A, b, tol);
    NodalField u(grid);
    for (std::size_t i = 0; i < interior.size(); ++i) u.values[interior[i]] = x[i];
    return u;
  }
  DiscreteFunctional F = fd_lagrangian(L, grid, pair);
  DOFVector u0{SpaceTag::FdNodal, std::vector<double>(grid.num_nodes(), 0.0)};
  DOFVector u = find_extremal(F, u0, tol);
  return NodalField(grid, std::move(u.x));
}

GridError fd_error(const NodalField& u, const ScalarField& exact) {
  const CartesianGrid& g = u.grid;
  const double hd = std::pow(g.spacing(), g.dim());
  GridError err;
  double s = 0.0;
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    double e = u.values[idx] - exact(g.node(g.unflatten(idx)));
    s += e * e * hd;
    err.max = std::max(err.max, std::abs(e));
  }
  err.l2 = std::sqrt(s);
  return err;
}

void write_nodal_csv(std::ostream& out, const NodalField& u) {
  const CartesianGrid& g = u.grid;
  for (int i = 0; i < g.dim(); ++i) out << "j" << i + 1 << ",";
  for (int i = 0; i < g.dim(); ++i) out << "x" << i + 1 << ",";
  out << "u\n";
  out.precision(17);
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    MultiIndex j = g.unflatten(idx);
    Vec x = g.node(j);
    for (int i = 0; i < g.dim(); ++i) out << j[i] << ",";
    for (int i = 0; i < g.dim(); ++i) out << x[i] << ",";
    out << u.values[idx] << "\n";
  }
}

}  // namespace cohere
