#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "cohere/vec.hpp"

namespace cohere {

using ScalarField = std::function<double(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;

// Pointwise symmetric positive definite diffusion tensor.
struct Diffusivity {
  int dim = 0;
  std::function<Mat(const Vec&)> at;
  bool constant = false;
  bool scalar = false;

  static Diffusivity identity(int dim);
  static Diffusivity isotropic(int dim, double value);
  static Diffusivity diagonal(const Vec& d);
};

struct PoissonForm {
  ScalarField f;
  Diffusivity alpha;
};

// L(x, y, v) with its partial derivatives in y and v.
struct LagrangianFn {
  int dim = 0;
  std::function<double(const Vec& x, double y, const Vec& v)> eval;
  std::function<double(const Vec& x, double y, const Vec& v)> dy;
  std::function<Vec(const Vec& x, double y, const Vec& v)> dv;
  bool convex = false;
  // Set when L is the quadratic Poisson form; enables direct linear solves.
  std::shared_ptr<const PoissonForm> poisson;
};

// H(x, y, p) with its partial derivatives in y and p.
struct HamiltonianFn {
  int dim = 0;
  std::function<double(const Vec& x, double y, const Vec& p)> eval;
  std::function<double(const Vec& x, double y, const Vec& p)> dy;
  std::function<Vec(const Vec& x, double y, const Vec& p)> dp;
  // v = g(x, y, p), the inverse of v -> dL/dv.
  std::function<Vec(const Vec& x, double y, const Vec& p)> velocity;
};

// L(x,y,v) = 1/2 (alpha(x) v).v - f(x) y
LagrangianFn poisson_lagrangian(ScalarField f, Diffusivity alpha);

// Numeric Legendre transform; Newton-solves dL/dv(x,y,g) = p per call.
// Throws std::runtime_error when the Newton iteration fails to converge
// (the Legendre property does not hold at that point).
HamiltonianFn legendre_transform(const LagrangianFn& L, double tol = 1e-13);

// Exact solution with matching source for convergence studies.
struct ManufacturedCase {
  std::string name;
  int dim = 0;
  ScalarField u;
  VectorField grad_u;
  ScalarField f;
  Diffusivity alpha;
};

// name in {sin1d, sinsin2d, quad1d, aniso2d}; throws on unknown names.
ManufacturedCase manufactured_case(const std::string& name);

}  // namespace cohere
