#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cohere {

enum class SpaceTag { FdNodal, FemNodal, FvCell, MfdBlock };

std::string to_string(SpaceTag tag);

struct DOFVector {
  SpaceTag tag;
  std::vector<double> x;

  std::size_t size() const { return x.size(); }
};

// A discrete Lagrangian/Hamiltonian functional together with its gradient
// in the coordinate basis: gradient(u)[i] = D L_h(u)(e_i).
struct DiscreteFunctional {
  SpaceTag tag;
  std::size_t dim = 0;
  std::function<double(const std::vector<double>&)> eval;
  std::function<std::vector<double>(const std::vector<double>&)> gradient;
  bool quadratic = false;
  bool convex = false;

  double operator()(const DOFVector& u) const { return eval(check(u)); }
  DOFVector grad(const DOFVector& u) const { return {tag, gradient(check(u))}; }
  double gateaux(const DOFVector& u, const DOFVector& v) const;

  const std::vector<double>& check(const DOFVector& u) const;
};

// Relative error between the analytic Gateaux derivative and a central
// finite difference of eval, minimized over a small set of step sizes.
double gateaux_fd_check(const DiscreteFunctional& F, const DOFVector& u, const DOFVector& v);

struct ExtremalFailure : std::runtime_error {
  ExtremalFailure(std::string msg, DOFVector best, double residual)
      : std::runtime_error(std::move(msg)), best_iterate(std::move(best)), residual_norm(residual) {}
  DOFVector best_iterate;
  double residual_norm;
};

// Nonlinear conjugate gradients on F; exact line search when F is quadratic.
// Returns u with ||gradient(u)||_inf <= tol * (1 + ||gradient(u0)||_inf).
DOFVector find_extremal(const DiscreteFunctional& F, const DOFVector& u0,
                        double tol = 1e-10, std::size_t max_iter = 10000);

struct CoherenceReport {
  std::string scheme;
  std::string mesh;
  int probes = 0;
  double max_abs = 0.0;
  double max_rel = 0.0;
  double tol = 0.0;
  bool pass = false;

  std::string to_json() const;
};

// Probes the identity gradient(u)[i] = mass[i] * residual(u)[i] on random
// states u drawn uniformly from [-1,1]^dim (deterministic for a fixed seed).
CoherenceReport coherence_check(
    const DiscreteFunctional& variational,
    const std::function<std::vector<double>(const std::vector<double>&)>& residual,
    const std::vector<double>& mass, int probes, std::uint64_t seed,
    double tol = 1e-12, const std::string& scheme = "", const std::string& mesh = "");

}  // namespace cohere
