#pragma once

// Dense row-major matrix over any scalar of the toolkit (double, Quad, Jet).
// Only what the geometry code needs: products, transposes, quadratic forms,
// Gauss-Jordan inversion with pivoting on primal values, determinants.

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "finsler/scalar.hpp"

namespace finsler {

template <class T>
class SmallMatrix {
 public:
  SmallMatrix() = default;
  SmallMatrix(int rows, int cols, const T& fill = T(0.0))
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), fill) {}

  static SmallMatrix identity(int n) {
    SmallMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1.0);
    return m;
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  T& operator()(int i, int j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
  const T& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i * cols_ + j)]; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

template <class T>
SmallMatrix<T> transpose(const SmallMatrix<T>& a) {
  SmallMatrix<T> r(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(j, i) = a(i, j);
  return r;
}

template <class T>
SmallMatrix<T> operator*(const SmallMatrix<T>& a, const SmallMatrix<T>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("SmallMatrix: shape mismatch in product");
  SmallMatrix<T> r(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      T acc = a(i, 0) * b(0, j);
      for (int k = 1; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      r(i, j) = acc;
    }
  return r;
}

template <class T>
SmallMatrix<T> operator+(const SmallMatrix<T>& a, const SmallMatrix<T>& b) {
  SmallMatrix<T> r = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) += b(i, j);
  return r;
}

template <class T>
SmallMatrix<T> operator-(const SmallMatrix<T>& a, const SmallMatrix<T>& b) {
  SmallMatrix<T> r = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) -= b(i, j);
  return r;
}

/// y^T M y for a matrix and vector of possibly different scalar types.
template <class M, class V>
V quadratic_form(const SmallMatrix<M>& m, std::span<const V> y) {
  V acc = V(0.0);
  for (int i = 0; i < m.rows(); ++i) {
    V row = V(0.0);
    for (int j = 0; j < m.cols(); ++j) row += m(i, j) * y[static_cast<std::size_t>(j)];
    acc += row * y[static_cast<std::size_t>(i)];
  }
  return acc;
}

template <class M, class V>
std::vector<V> apply(const SmallMatrix<M>& m, std::span<const V> y) {
  std::vector<V> r(static_cast<std::size_t>(m.rows()), V(0.0));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(i)] += m(i, j) * y[static_cast<std::size_t>(j)];
  return r;
}

/// Inverse by Gauss-Jordan elimination, pivoting on the largest primal value.
template <class T>
SmallMatrix<T> inverse(SmallMatrix<T> a) {
  const int n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("SmallMatrix: inverse of non-square matrix");
  SmallMatrix<T> inv = SmallMatrix<T>::identity(n);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(math::primal(a(col, col)));
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(math::primal(a(r, col)));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) throw std::domain_error("SmallMatrix: singular matrix");
    if (pivot != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(a(col, j), a(pivot, j));
        std::swap(inv(col, j), inv(pivot, j));
      }
    }
    const T p = a(col, col);
    for (int j = 0; j < n; ++j) {
      a(col, j) = a(col, j) / p;
      inv(col, j) = inv(col, j) / p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const T f = a(r, col);
      for (int j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

template <class T>
T determinant(SmallMatrix<T> a) {
  const int n = a.rows();
  T det = T(1.0);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(math::primal(a(col, col)));
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(math::primal(a(r, col)));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) return T(0.0);
    if (pivot != col) {
      for (int j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
      det = -det;
    }
    det = det * a(col, col);
    for (int r = col + 1; r < n; ++r) {
      const T f = a(r, col) / a(col, col);
      for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
    }
  }
  return det;
}

template <class T>
Eigen::MatrixXd primal_matrix(const SmallMatrix<T>& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m(i, j) = math::primal(a(i, j));
  return m;
}

template <class T>
SmallMatrix<T> from_eigen(const Eigen::MatrixXd& m) {
  SmallMatrix<T> r(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j) r(i, j) = T(m(i, j));
  return r;
}

}  // namespace finsler
