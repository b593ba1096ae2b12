#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace finsler {

/// Dense n x n x n array; entry (a, b, c) at a*n*n + b*n + c.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n), 0.0) {}

  int dimension() const noexcept { return n_; }
  double& operator()(int a, int b, int c) { return data_[index(a, b, c)]; }
  double operator()(int a, int b, int c) const { return data_[index(a, b, c)]; }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }
  const std::vector<double>& data() const noexcept { return data_; }

 private:
  std::size_t index(int a, int b, int c) const {
    return static_cast<std::size_t>((a * n_ + b) * n_ + c);
  }
  int n_ = 0;
  std::vector<double> data_;
};

/// Dense n^4 array; entry (a, b, c, d).
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n * n), 0.0) {}

  int dimension() const noexcept { return n_; }
  double& operator()(int a, int b, int c, int d) { return data_[index(a, b, c, d)]; }
  double operator()(int a, int b, int c, int d) const { return data_[index(a, b, c, d)]; }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }
  const std::vector<double>& data() const noexcept { return data_; }

 private:
  std::size_t index(int a, int b, int c, int d) const {
    return static_cast<std::size_t>(((a * n_ + b) * n_ + c) * n_ + d);
  }
  int n_ = 0;
  std::vector<double> data_;
};

}  // namespace finsler
