#include "cohere/problem.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cohere {

Diffusivity Diffusivity::identity(int dim) {
  return {dim, [dim](const Vec&) { return Mat::identity(dim); }, true, true};
}

Diffusivity Diffusivity::isotropic(int dim, double value) {
  if (value <= 0.0) throw std::invalid_argument("Diffusivity: value must be positive");
  return {dim, [dim, value](const Vec&) { return Mat::scalar(dim, value); }, true, true};
}

Diffusivity Diffusivity::diagonal(const Vec& d) {
  for (int i = 0; i < d.dim(); ++i)
    if (d[i] <= 0.0) throw std::invalid_argument("Diffusivity: diagonal entries must be positive");
  Mat m = Mat::diag(d);
  return {d.dim(), [m](const Vec&) { return m; }, true, false};
}

LagrangianFn poisson_lagrangian(ScalarField f, Diffusivity alpha) {
  LagrangianFn L;
  L.dim = alpha.dim;
  L.convex = true;
  auto form = std::make_shared<PoissonForm>(PoissonForm{f, alpha});
  L.poisson = form;
  L.eval = [form](const Vec& x, double y, const Vec& v) {
    return 0.5 * form->alpha.at(x).apply(v).dot(v) - form->f(x) * y;
  };
  L.dy = [form](const Vec& x, double, const Vec&) { return -form->f(x); };
  L.dv = [form](const Vec& x, double, const Vec& v) { return form->alpha.at(x).apply(v); };
  return L;
}

HamiltonianFn legendre_transform(const LagrangianFn& L, double tol) {
  const int d = L.dim;
  auto dv = L.dv;
  // g(x,y,p): Newton on r(v) = dL/dv(x,y,v) - p with finite-difference Jacobian.
  auto solve_g = [dv, d, tol](const Vec& x, double y, const Vec& p) -> Vec {
    Vec v(d);
    for (int iter = 0; iter < 60; ++iter) {
      Vec r = dv(x, y, v) - p;
      double rn = r.norm();
      if (rn <= tol * (1.0 + p.norm())) return v;
      Mat jac(d);
      double eps = 1e-7 * (1.0 + v.norm());
      for (int j = 0; j < d; ++j) {
        Vec vp = v, vm = v;
        vp[j] += eps;
        vm[j] -= eps;
        Vec dr = dv(x, y, vp) - dv(x, y, vm);
        for (int i = 0; i < d; ++i) jac(i, j) = dr[i] / (2.0 * eps);
      }
      Vec step = jac.inverse().apply(r);
      v -= step;
    }
    std::ostringstream os;
    os << "legendre_transform: Newton failed at x=(";
    for (int i = 0; i < d; ++i) os << (i ? "," : "") << x[i];
    os << "), y=" << y << ", p=(";
    for (int i = 0; i < d; ++i) os << (i ? "," : "") << p[i];
    os << ")";
    throw std::runtime_error(os.str());
  };

  HamiltonianFn H;
  H.dim = d;
  H.velocity = solve_g;
  auto Leval = L.eval;
  auto Ldy = L.dy;
  H.eval = [solve_g, Leval](const Vec& x, double y, const Vec& p) {
    Vec g = solve_g(x, y, p);
    return p.dot(g) - Leval(x, y, g);
  };
  H.dp = solve_g;  // envelope identity
  H.dy = [solve_g, Ldy](const Vec& x, double y, const Vec& p) {
    return -Ldy(x, y, solve_g(x, y, p));
  };
  return H;
}

ManufacturedCase manufactured_case(const std::string& name) {
  const double pi = 3.14159265358979323846;
  ManufacturedCase mc;
  mc.name = name;
  if (name == "sin1d") {
    mc.dim = 1;
    mc.alpha = Diffusivity::identity(1);
    mc.u = [pi](const Vec& x) { return std::sin(pi * x[0]); };
    mc.grad_u = [pi](const Vec& x) { return Vec(pi * std::cos(pi * x[0])); };
    mc.f = [pi](const Vec& x) { return pi * pi * std::sin(pi * x[0]); };
  } else if (name == "quad1d") {
    mc.dim = 1;
    mc.alpha = Diffusivity::identity(1);
    mc.u = [](const Vec& x) { return 0.5 * x[0] * (1.0 - x[0]); };
    mc.grad_u = [](const Vec& x) { return Vec(0.5 - x[0]); };
    mc.f = [](const Vec&) { return 1.0; };
  } else if (name == "sinsin2d") {
    mc.dim = 2;
    mc.alpha = Diffusivity::identity(2);
    mc.u = [pi](const Vec& x) { return std::sin(pi * x[0]) * std::sin(pi * x[1]); };
    mc.grad_u = [pi](const Vec& x) {
      return Vec(pi * std::cos(pi * x[0]) * std::sin(pi * x[1]),
                 pi * std::sin(pi * x[0]) * std::cos(pi * x[1]));
    };
    mc.f = [pi](const Vec& x) { return 2.0 * pi * pi * std::sin(pi * x[0]) * std::sin(pi * x[1]); };
  } else if (name == "aniso2d") {
    mc.dim = 2;
    mc.alpha = Diffusivity::diagonal(Vec(1.0, 2.0));
    mc.u = [pi](const Vec& x) { return std::sin(pi * x[0]) * std::sin(pi * x[1]); };
    mc.grad_u = [pi](const Vec& x) {
      return Vec(pi * std::cos(pi * x[0]) * std::sin(pi * x[1]),
                 pi * std::sin(pi * x[0]) * std::cos(pi * x[1]));
    };
    mc.f = [pi](const Vec& x) { return 3.0 * pi * pi * std::sin(pi * x[0]) * std::sin(pi * x[1]); };
  } else {
    throw std::invalid_argument("manufactured_case: unknown case '" + name + "'");
  }
  return mc;
}

}  // namespace cohere
