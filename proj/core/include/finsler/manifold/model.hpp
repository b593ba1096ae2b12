#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "finsler/generic.hpp"
#include "finsler/point.hpp"
#include "finsler/small_matrix.hpp"
#include "finsler/tensor.hpp"

namespace finsler::manifold {

using Domain = std::function<bool(std::span<const double>)>;

/// Second-order change of coordinates x = p + E z + Q(z, z) / 2, mapping new
/// coordinates z (centered at 0) into the old chart.
struct ChartMap {
  Eigen::VectorXd p;
  Eigen::MatrixXd E;
  Tensor3 Q;  // Q(i, b, c), symmetric in (b, c)

  int dimension() const { return static_cast<int>(p.size()); }

  template <class T>
  std::vector<T> apply(std::span<const T> z) const {
    const int n = dimension();
    std::vector<T> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      T acc = T(p(i));
      for (int b = 0; b < n; ++b) {
        acc += E(i, b) * z[static_cast<std::size_t>(b)];
        for (int c = 0; c < n; ++c) {
          if (Q(i, b, c) != 0.0) acc += 0.5 * Q(i, b, c) * z[static_cast<std::size_t>(b)] * z[static_cast<std::size_t>(c)];
        }
      }
      x[static_cast<std::size_t>(i)] = acc;
    }
    return x;
  }

  /// dx / dz at z.
  template <class T>
  SmallMatrix<T> jacobian(std::span<const T> z) const {
    const int n = dimension();
    SmallMatrix<T> j(n, n);
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < n; ++b) {
        T acc = T(E(i, b));
        for (int c = 0; c < n; ++c) {
          if (Q(i, b, c) != 0.0) acc += Q(i, b, c) * z[static_cast<std::size_t>(c)];
        }
        j(i, b) = acc;
      }
    return j;
  }

  /// Old-chart point of z.
  ChartPoint to_old(const ChartPoint& z) const;
  /// Old-chart components of a fiber vector given in the new chart at z = 0.
  FiberVector push_fiber(const FiberVector& y) const;
};

struct ProjectorResidual {
  double symmetry = 0.0;
  double idempotency = 0.0;  // |b a^-1 b - b|
  int rank = 0;
};

/// A Riemannian metric alpha together with an alpha-orthogonal splitting
/// TM = V1 + V2 of dimensions (n1, n2), described in one chart.  `alpha` is
/// the full metric; `b` lowers the projector onto V2, so alpha_2^2 = b(y, y)
/// and alpha_1^2 = alpha^2 - alpha_2^2.
class ManifoldModel {
 public:
  ManifoldModel() = default;
  ManifoldModel(std::string name, int n1, int n2, MatrixField alpha, MatrixField b, Domain domain,
                ChartPoint default_point);

  const std::string& name() const noexcept { return name_; }
  int dimension() const noexcept { return n1_ + n2_; }
  int n1() const noexcept { return n1_; }
  int n2() const noexcept { return n2_; }
  const ChartPoint& default_point() const noexcept { return default_point_; }
  bool in_domain(std::span<const double> x) const { return !domain_ || domain_(x); }
  const Domain& domain() const noexcept { return domain_; }

  template <class T>
  SmallMatrix<T> alpha(std::span<const T> x) const {
    return alpha_.template get<T>()(x);
  }
  template <class T>
  SmallMatrix<T> b(std::span<const T> x) const {
    return b_.template get<T>()(x);
  }
  /// The alpha_1 block alpha - b.
  template <class T>
  SmallMatrix<T> a(std::span<const T> x) const {
    return alpha<T>(x) - b<T>(x);
  }

  const MatrixField& alpha_field() const noexcept { return alpha_; }
  const MatrixField& b_field() const noexcept { return b_; }

  /// Same geometry expressed in the coordinates z of `map`.
  ManifoldModel pullback(const ChartMap& map) const;

  ProjectorResidual projector_residual(const ChartPoint& x) const;

  /// alpha = I, b = diag(0, ..., 0, 1, ..., 1) on all of R^n.
  static ManifoldModel flat_product(int n1 = 1, int n2 = 1);

  /// Flat R^2 minus the origin, V1 = span d_theta, V2 = span d_r.
  static ManifoldModel polar_plane(double r0 = 1.0);

  /// Round S^3 = SU(2) in the exponential chart at the identity, V2 tangent
  /// to the Hopf fibers (left multiplication by diag(e^{it}, e^{-it})).
  static ManifoldModel hopf_sphere();

  /// b = alpha V (V^T alpha V)^-1 V^T alpha for an n x n2 frame field V of V2.
  static ManifoldModel from_subbundle(std::string name, int n1, int n2, MatrixField alpha, MatrixField frame,
                                      Domain domain, ChartPoint default_point);

 private:
  std::string name_;
  int n1_ = 0;
  int n2_ = 0;
  MatrixField alpha_;
  MatrixField b_;
  Domain domain_;
  ChartPoint default_point_;
};

/// One term c * prod x_i^{e_i} of a polynomial coefficient.
struct Monomial {
  double coefficient = 0.0;
  std::vector<int> exponents;
};
using Polynomial = std::vector<Monomial>;
using PolynomialMatrix = std::vector<std::vector<Polynomial>>;

template <class T>
T evaluate_polynomial(const Polynomial& p, std::span<const T> x) {
  T acc = T(0.0);
  for (const auto& m : p) {
    T term = T(m.coefficient);
    for (std::size_t i = 0; i < m.exponents.size(); ++i) {
      if (m.exponents[i] > 0) term = term * math::ipow(x[i], m.exponents[i]);
    }
    acc += term;
  }
  return acc;
}

MatrixField polynomial_matrix_field(PolynomialMatrix table);

/// Model from polynomial tables: `alpha` is n x n; `v2_frame` is n x n2 and
/// spans V2 (b is derived from it).
ManifoldModel polynomial_model(std::string name, int n1, int n2, PolynomialMatrix alpha, PolynomialMatrix v2_frame,
                               ChartPoint default_point);

/// "flat-product", "polar-plane", "hopf-sphere".
ManifoldModel builtin_model(const std::string& name);
std::vector<std::string> builtin_model_names();

}  // namespace finsler::manifold
