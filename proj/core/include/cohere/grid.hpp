#pragma once

#include <array>
#include <cstddef>

#include "cohere/vec.hpp"

namespace cohere {

using MultiIndex = std::array<int, 3>;

// Uniform Cartesian grid on [0,1]^d with N subdivisions per direction.
// Nodes are x_j = j*h, h = 1/N, for multi-indices 0 <= j <= N.
class CartesianGrid {
 public:
  CartesianGrid(int dim, int n);  // throws std::invalid_argument

  int dim() const { return dim_; }
  int subdivisions() const { return n_; }
  double spacing() const { return 1.0 / n_; }

  std::size_t num_nodes() const;     // (N+1)^d
  std::size_t num_interior() const;  // (N-1)^d

  std::size_t flatten(const MultiIndex& j) const;
  MultiIndex unflatten(std::size_t idx) const;

  bool in_range(const MultiIndex& j) const;   // 0 <= j <= N
  bool is_boundary(const MultiIndex& j) const;  // some component in {0, N}
  bool is_interior(const MultiIndex& j) const { return in_range(j) && !is_boundary(j); }

  Vec node(const MultiIndex& j) const;

  static MultiIndex shift_up(MultiIndex j, int dir) { ++j[dir]; return j; }
  static MultiIndex shift_down(MultiIndex j, int dir) { --j[dir]; return j; }

 private:
  int dim_;
  int n_;
};

}  // namespace cohere
