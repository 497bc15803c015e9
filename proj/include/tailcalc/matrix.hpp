#ifndef TAILCALC_MATRIX_HPP
#define TAILCALC_MATRIX_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tailcalc/field.hpp"

namespace tailcalc {

// Dense row-major matrix over a coefficient field.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, from_long<T>(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = from_long<T>(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  friend Matrix operator+(const Matrix& x, const Matrix& y) {
    same_shape(x, y);
    Matrix r = x;
    for (std::size_t i = 0; i < r.a_.size(); ++i) r.a_[i] = r.a_[i] + y.a_[i];
    return r;
  }
  friend Matrix operator-(const Matrix& x, const Matrix& y) {
    same_shape(x, y);
    Matrix r = x;
    for (std::size_t i = 0; i < r.a_.size(); ++i) r.a_[i] = r.a_[i] - y.a_[i];
    return r;
  }
  friend Matrix operator*(const Matrix& x, const Matrix& y) {
    if (x.cols_ != y.rows_) throw std::invalid_argument("matrix shapes do not compose");
    Matrix r(x.rows_, y.cols_);
    for (std::size_t i = 0; i < x.rows_; ++i) {
      for (std::size_t k = 0; k < x.cols_; ++k) {
        const T& xik = x(i, k);
        if (is_zero(xik)) continue;
        for (std::size_t j = 0; j < y.cols_; ++j) {
          if (is_zero(y(k, j))) continue;
          r(i, j) = r(i, j) + xik * y(k, j);
        }
      }
    }
    return r;
  }
  Matrix scaled(const T& k) const {
    Matrix r = *this;
    for (auto& v : r.a_) v = v * k;
    return r;
  }

  std::vector<T> apply(const std::vector<T>& v) const {
    if (v.size() != cols_) throw std::invalid_argument("vector length does not match matrix");
    std::vector<T> out(rows_, from_long<T>(0));
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) {
        if (is_zero((*this)(i, j)) || is_zero(v[j])) continue;
        out[i] = out[i] + (*this)(i, j) * v[j];
      }
    }
    return out;
  }

  Matrix pow(unsigned n) const {
    Matrix r = identity(rows_);
    for (unsigned k = 0; k < n; ++k) r = r * *this;
    return r;
  }

  bool is_lower_triangular() const {
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = i + 1; j < cols_; ++j) {
        if (!is_zero((*this)(i, j))) return false;
      }
    }
    return true;
  }

  bool is_zero_matrix() const {
    for (const auto& v : a_) {
      if (!is_zero(v)) return false;
    }
    return true;
  }

  friend bool operator==(const Matrix& x, const Matrix& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
  }
  friend bool operator!=(const Matrix& x, const Matrix& y) { return !(x == y); }

 private:
  static void same_shape(const Matrix& x, const Matrix& y) {
    if (x.rows_ != y.rows_ || x.cols_ != y.cols_) throw std::invalid_argument("matrix shapes differ");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> a_;
};

// Forward substitution; the matrix must be lower triangular with a nonzero diagonal.
template <class T>
std::vector<T> solve_lower(const Matrix<T>& a, const std::vector<T>& b) {
  if (a.rows() != a.cols() || b.size() != a.rows()) throw std::invalid_argument("solve_lower: shape mismatch");
  if (!a.is_lower_triangular()) throw std::invalid_argument("solve_lower: matrix is not lower triangular");
  std::vector<T> x(b.size(), from_long<T>(0));
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (is_zero(a(i, i))) throw std::domain_error("solve_lower: singular diagonal at row " + std::to_string(i));
    T s = b[i];
    for (std::size_t j = 0; j < i; ++j) {
      if (!is_zero(a(i, j)) && !is_zero(x[j])) s = s - a(i, j) * x[j];
    }
    x[i] = s / a(i, i);
  }
  return x;
}

template <class T>
std::vector<T> add_vectors(const std::vector<T>& x, const std::vector<T>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("vector lengths differ");
  std::vector<T> r = x;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = r[i] + y[i];
  return r;
}

template <class T>
std::vector<T> scale_vector(const std::vector<T>& x, const T& k) {
  std::vector<T> r = x;
  for (auto& v : r) v = v * k;
  return r;
}

}  // namespace tailcalc

#endif  // TAILCALC_MATRIX_HPP
