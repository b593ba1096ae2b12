#pragma once

#include <Eigen/Dense>
#include <initializer_list>
#include <span>
#include <vector>

namespace finsler {

/// Chart coordinates x = (x^i) of a base point.
struct ChartPoint {
  Eigen::VectorXd coords;

  ChartPoint() = default;
  explicit ChartPoint(Eigen::VectorXd c) : coords(std::move(c)) {}
  ChartPoint(std::initializer_list<double> c)
      : coords(Eigen::Map<const Eigen::VectorXd>(c.begin(), static_cast<Eigen::Index>(c.size()))) {}
  static ChartPoint origin(int n) { return ChartPoint(Eigen::VectorXd::Zero(n)); }

  int dimension() const noexcept { return static_cast<int>(coords.size()); }
  std::span<const double> span() const noexcept {
    return {coords.data(), static_cast<std::size_t>(coords.size())};
  }
};

/// Components y = (y^i) of a tangent vector in the chart frame.
struct FiberVector {
  Eigen::VectorXd coords;

  FiberVector() = default;
  explicit FiberVector(Eigen::VectorXd c) : coords(std::move(c)) {}
  FiberVector(std::initializer_list<double> c)
      : coords(Eigen::Map<const Eigen::VectorXd>(c.begin(), static_cast<Eigen::Index>(c.size()))) {}

  int dimension() const noexcept { return static_cast<int>(coords.size()); }
  bool is_zero() const { return coords.isZero(0.0); }
  std::span<const double> span() const noexcept {
    return {coords.data(), static_cast<std::size_t>(coords.size())};
  }
};

}  // namespace finsler
