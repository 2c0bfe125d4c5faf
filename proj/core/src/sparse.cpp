#include "cohere/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace cohere {

void SparseMatrix::add(std::size_t row, std::size_t col, double value) {
  if (finalized_) throw std::logic_error("SparseMatrix: add after finalize");
  if (row >= rows_ || col >= cols_) throw std::out_of_range("SparseMatrix: index out of range");
  triplets_.push_back({row, col, value});
}

void SparseMatrix::finalize() {
  if (finalized_) return;
  std::sort(triplets_.begin(), triplets_.end(), [](const Triplet& a, const Triplet& b) {
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
  });
  row_ptr_.assign(rows_ + 1, 0);
  for (std::size_t i = 0; i < triplets_.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < triplets_.size() && triplets_[j].row == triplets_[i].row &&
           triplets_[j].col == triplets_[i].col)
      sum += triplets_[j++].value;
    col_idx_.push_back(triplets_[i].col);
    values_.push_back(sum);
    ++row_ptr_[triplets_[i].row + 1];
    i = j;
  }
  for (std::size_t r = 0; r < rows_; ++r) row_ptr_[r + 1] += row_ptr_[r];
  triplets_.clear();
  triplets_.shrink_to_fit();
  finalized_ = true;
}

void SparseMatrix::apply(const std::vector<double>& x, std::vector<double>& y) const {
  if (!finalized_) throw std::logic_error("SparseMatrix: apply before finalize");
  if (x.size() != cols_) throw std::invalid_argument("SparseMatrix: dimension mismatch");
  y.assign(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::size_t i = row_ptr_[r]; i < row_ptr_[r + 1]; ++i) s += values_[i] * x[col_idx_[i]];
    y[r] = s;
  }
}

std::vector<double> SparseMatrix::apply(const std::vector<double>& x) const {
  std::vector<double> y;
  apply(x, y);
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  if (!finalized_) throw std::logic_error("SparseMatrix: transpose before finalize");
  SparseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t i = row_ptr_[r]; i < row_ptr_[r + 1]; ++i) t.add(col_idx_[i], r, values_[i]);
  t.finalize();
  return t;
}

std::vector<std::vector<double>> SparseMatrix::to_dense() const {
  if (!finalized_) throw std::logic_error("SparseMatrix: to_dense before finalize");
  std::vector<std::vector<double>> d(rows_, std::vector<double>(cols_, 0.0));
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t i = row_ptr_[r]; i < row_ptr_[r + 1]; ++i) d[r][col_idx_[i]] += values_[i];
  return d;
}

double SparseMatrix::max_asymmetry() const {
  if (!finalized_) throw std::logic_error("SparseMatrix: not finalized");
  std::map<std::pair<std::size_t, std::size_t>, double> entries;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t i = row_ptr_[r]; i < row_ptr_[r + 1]; ++i)
      entries[{r, col_idx_[i]}] = values_[i];
  double m = 0.0;
  for (const auto& [rc, v] : entries) {
    auto it = entries.find({rc.second, rc.first});
    double vt = it == entries.end() ? 0.0 : it->second;
    m = std::max(m, std::abs(v - vt));
  }
  return m;
}

double norm2(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

double norm_inf(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> cg_solve(const LinearOperator& A, const std::vector<double>& b,
                             double tol, std::size_t max_iter) {
  const std::size_t n = b.size();
  std::vector<double> x(n, 0.0);
  double bnorm = norm2(b);
  if (bnorm == 0.0) return x;
  std::vector<double> r = b;  // r = b - A*0
  std::vector<double> p = r;
  std::vector<double> ap(n);
  double rr = dot(r, r);
  if (max_iter == 0) max_iter = 10 * n + 100;
  for (std::size_t it = 0; it < max_iter; ++it) {
    if (std::sqrt(rr) <= tol * bnorm) return x;
    A(p, ap);
    double pap = dot(p, ap);
    if (pap <= 0.0)
      throw std::runtime_error("cg_solve: non-positive curvature encountered (matrix not SPD)");
    double alpha = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    double rr_new = dot(r, r);
    double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  if (std::sqrt(rr) <= tol * bnorm) return x;
  throw std::runtime_error("cg_solve: no convergence within iteration limit");
}

std::vector<double> cg_solve(const SparseMatrix& A, const std::vector<double>& b,
                             double tol, std::size_t max_iter) {
  return cg_solve([&A](const std::vector<double>& x, std::vector<double>& y) { A.apply(x, y); },
                  b, tol, max_iter);
}

SaddleSolution saddle_solve(const SaddleSystem& sys, double tol) {
  const std::size_t nu = sys.B.rows();
  SparseMatrix Bt = sys.B.transpose();
  double inner_tol = std::max(1e-14, tol * 1e-3);

  auto solve_M = [&](const std::vector<double>& rhs) {
    try {
      return cg_solve(sys.M, rhs, inner_tol, 0);
    } catch (const std::runtime_error& err) {
      throw std::runtime_error(std::string("saddle_solve: inner flux-block solve failed: ") + err.what());
    }
  };

  LinearOperator schur = [&](const std::vector<double>& v, std::vector<double>& y) {
    std::vector<double> btv = Bt.apply(v);
    std::vector<double> minv = solve_M(btv);
    sys.B.apply(minv, y);
  };

  // M p + B^T u = 0,  B p = rhs_u  =>  (B M^-1 B^T) u = -rhs_u.
  std::vector<double> neg_rhs(nu);
  for (std::size_t i = 0; i < nu; ++i) neg_rhs[i] = -sys.rhs_u[i];
  std::vector<double> u;
  try {
    u = cg_solve(schur, neg_rhs, tol, 0);
  } catch (const std::runtime_error& err) {
    throw std::runtime_error(std::string("saddle_solve: outer Schur-complement solve failed: ") + err.what());
  }
  std::vector<double> btu = Bt.apply(u);
  for (double& v : btu) v = -v;
  std::vector<double> p = solve_M(btu);
  return {std::move(p), std::move(u)};
}

}  // namespace cohere
