#include "cohere/grid.hpp"

#include <stdexcept>

namespace cohere {

CartesianGrid::CartesianGrid(int dim, int n) : dim_(dim), n_(n) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("CartesianGrid: dimension must be 1, 2 or 3");
  if (n < 1) throw std::invalid_argument("CartesianGrid: need at least one subdivision");
}

std::size_t CartesianGrid::num_nodes() const {
  std::size_t c = 1;
  for (int i = 0; i < dim_; ++i) c *= static_cast<std::size_t>(n_ + 1);
  return c;
}

std::size_t CartesianGrid::num_interior() const {
  std::size_t c = 1;
  for (int i = 0; i < dim_; ++i) c *= static_cast<std::size_t>(n_ > 1 ? n_ - 1 : 0);
  return c;
}

std::size_t CartesianGrid::flatten(const MultiIndex& j) const {
  std::size_t idx = 0;
  for (int i = dim_ - 1; i >= 0; --i) idx = idx * (n_ + 1) + j[i];
  return idx;
}

MultiIndex CartesianGrid::unflatten(std::size_t idx) const {
  MultiIndex j{0, 0, 0};
  for (int i = 0; i < dim_; ++i) {
    j[i] = static_cast<int>(idx % (n_ + 1));
    idx /= (n_ + 1);
  }
  return j;
}

bool CartesianGrid::in_range(const MultiIndex& j) const {
  for (int i = 0; i < dim_; ++i)
    if (j[i] < 0 || j[i] > n_) return false;
  return true;
}

bool CartesianGrid::is_boundary(const MultiIndex& j) const {
  for (int i = 0; i < dim_; ++i)
    if (j[i] == 0 || j[i] == n_) return true;
  return false;
}

Vec CartesianGrid::node(const MultiIndex& j) const {
  Vec x(dim_);
  for (int i = 0; i < dim_; ++i) x[i] = j[i] * spacing();
  return x;
}

}  // namespace cohere
