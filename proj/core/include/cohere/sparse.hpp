#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace cohere {

// Row-compressed sparse matrix assembled from (row, col, value) triplets.
// Triplets are sorted and duplicates summed at finalization, so assembly
// order does not affect the stored matrix.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  void add(std::size_t row, std::size_t col, double value);
  void finalize();
  bool finalized() const { return finalized_; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void set_symmetric(bool s) { symmetric_ = s; }
  bool symmetric() const { return symmetric_; }

  void apply(const std::vector<double>& x, std::vector<double>& y) const;
  std::vector<double> apply(const std::vector<double>& x) const;
  SparseMatrix transpose() const;
  std::vector<std::vector<double>> to_dense() const;

  double max_asymmetry() const;  // max |A - A^T| over stored entries

 private:
  struct Triplet {
    std::size_t row, col;
    double value;
  };
  std::size_t rows_ = 0, cols_ = 0;
  bool finalized_ = false;
  bool symmetric_ = false;
  std::vector<Triplet> triplets_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

using LinearOperator = std::function<void(const std::vector<double>&, std::vector<double>&)>;

// Conjugate gradients for SPD systems: ||Ax - b|| <= tol ||b||.
// Throws std::runtime_error on non-convergence or detected negative curvature.
std::vector<double> cg_solve(const LinearOperator& A, const std::vector<double>& b,
                             double tol, std::size_t max_iter);
std::vector<double> cg_solve(const SparseMatrix& A, const std::vector<double>& b,
                             double tol, std::size_t max_iter = 0);

// Block system  [M  B^T] [p]   [ 0 ]
//               [B   0 ] [u] = [rhs_u]
// with M SPD; solved by CG on the Schur complement B M^-1 B^T.
struct SaddleSystem {
  SparseMatrix M;
  SparseMatrix B;
  std::vector<double> rhs_u;
};

struct SaddleSolution {
  std::vector<double> p;
  std::vector<double> u;
};

SaddleSolution saddle_solve(const SaddleSystem& sys, double tol);

double norm2(const std::vector<double>& v);
double norm_inf(const std::vector<double>& v);
double dot(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace cohere
