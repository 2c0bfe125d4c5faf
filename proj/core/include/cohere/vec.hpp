#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>

namespace cohere {

// Small fixed-capacity vector for points and gradients, dimension <= 3.
class Vec {
 public:
  Vec() : dim_(0), c_{0.0, 0.0, 0.0} {}
  explicit Vec(int dim) : dim_(dim), c_{0.0, 0.0, 0.0} { assert(dim >= 0 && dim <= 3); }
  Vec(double x) : dim_(1), c_{x, 0.0, 0.0} {}
  Vec(double x, double y) : dim_(2), c_{x, y, 0.0} {}
  Vec(double x, double y, double z) : dim_(3), c_{x, y, z} {}

  int dim() const { return dim_; }
  double operator[](int i) const { assert(i >= 0 && i < dim_); return c_[i]; }
  double& operator[](int i) { assert(i >= 0 && i < dim_); return c_[i]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < dim_; ++i) c_[i] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator*(Vec a, double s) { return a *= s; }

  double dot(const Vec& o) const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += c_[i] * o.c_[i];
    return s;
  }
  double norm() const { return std::sqrt(dot(*this)); }

 private:
  int dim_;
  std::array<double, 3> c_;
};

// Symmetric-capable d x d matrix, d <= 3.
class Mat {
 public:
  Mat() : dim_(0) { a_.fill(0.0); }
  explicit Mat(int dim) : dim_(dim) { a_.fill(0.0); }

  static Mat identity(int dim) {
    Mat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }
  static Mat scalar(int dim, double s) {
    Mat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = s;
    return m;
  }
  static Mat diag(const Vec& d) {
    Mat m(d.dim());
    for (int i = 0; i < d.dim(); ++i) m(i, i) = d[i];
    return m;
  }

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return a_[3 * i + j]; }
  double& operator()(int i, int j) { return a_[3 * i + j]; }

  Vec apply(const Vec& v) const {
    Vec r(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
  }

  Mat inverse() const;

 private:
  int dim_;
  std::array<double, 9> a_;
};

}  // namespace cohere
