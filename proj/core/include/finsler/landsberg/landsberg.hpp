#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/generic.hpp"
#include "finsler/metrics/metric.hpp"
#include "finsler/point.hpp"
#include "finsler/tensor.hpp"

namespace finsler::landsberg {

using metrics::MinkowskiNorm;

/// A vector valued function f = (f_1, ..., f_n) on the slit fiber, meant to
/// be positively 2-homogeneous.
class FiberField {
 public:
  FiberField() = default;
  FiberField(int dimension, GenericFunction<VectorFn> f, std::string name = {})
      : n_(dimension), f_(std::move(f)), name_(std::move(name)) {}

  int dimension() const noexcept { return n_; }
  const std::string& name() const noexcept { return name_; }
  const GenericFunction<VectorFn>& function() const noexcept { return f_; }

  template <class T>
  std::vector<T> operator()(std::span<const T> y) const {
    auto v = f_.template get<T>()(y);
    if (static_cast<int>(v.size()) != n_) throw EvaluationError("fiber field '" + name_ + "' returned the wrong size");
    return v;
  }
  Eigen::VectorXd at(const FiberVector& y) const;

  /// max |f(lambda y) - lambda^2 f(y)| / max(1, |f(y)|) over the samples, lambda in {0.5, 2}.
  double homogeneity_residual(const std::vector<FiberVector>& samples) const;

  static FiberField zero(int n);

 private:
  int n_ = 0;
  GenericFunction<VectorFn> f_;
  std::string name_;
};

/// a f + b h.
FiberField combine(double a, const FiberField& f, double b, const FiberField& h);

/// An invertible linear map xi with xi e_i = xi^j_i e_j, stored as the matrix
/// whose column i is xi e_i; eta is its inverse.
struct LinearMap {
  Eigen::MatrixXd xi;
  Eigen::MatrixXd eta;

  /// Throws PreconditionError when xi is singular.
  static LinearMap from_matrix(const Eigen::MatrixXd& xi);
  static LinearMap identity(int n);
  /// diag(R1, R2) with R1 in O(n1), R2 in O(n2).
  static LinearMap block(const Eigen::MatrixXd& r1, const Eigen::MatrixXd& r2);
  /// Reflection y^i -> -y^i for every listed index.
  static LinearMap reflection(int n, const std::vector<int>& indices);

  int dimension() const noexcept { return static_cast<int>(xi.rows()); }
  /// (this o other): first other, then this.
  LinearMap compose(const LinearMap& other) const;
};

/// `count` deterministic elements of O(n1) x O(n2): products of Givens
/// rotations with Halton angles, every other one with a reflection folded in.
std::vector<LinearMap> block_rotations(int n1, int n2, int count);

/// (xi f)_j(y) = xi^i_j f_i(xi y).
FiberField isometry_action(const LinearMap& map, const FiberField& f);

/// (1/2)(f + sign * rho f) for a reflection rho; the even (+1) and odd (-1) parts.
FiberField parity_part(const LinearMap& rho, const FiberField& f, int sign);

/// G^i(f) = (1/4) g^il (y^k d_{y^l} f_k - f_l).
Eigen::VectorXd landsberg_operator(const MinkowskiNorm& norm, const FiberField& f, const FiberVector& y);

struct ResidualTable {
  Tensor3 values;  // y^j g_ij [G^i(f)]_{y^p y^q y^r}
  double max_abs = 0.0;
};

ResidualTable landsberg_residual(const MinkowskiNorm& norm, const FiberField& f, const FiberVector& y);

inline constexpr double kSolutionTolerance = 1e-8;
inline constexpr double kIsometryTolerance = 1e-10;
inline constexpr int kIsometrySamples = 200;

/// f_l(y) = [F^2]_{x^l}(p, y) for an (alpha1, alpha2)-metric, assembled as
/// L1 (d_l a_ij) y^i y^j + L2 (d_l b_ij) y^i y^j.
FiberField canonical_f(const metrics::MetricSpec& spec, const ChartPoint& p);

struct InvarianceReport {
  double isometry_residual = 0.0;     // max |F(xi y) - F(y)| / F(y)
  double hessian_residual = 0.0;      // max |g(xi y) - eta^T g(y) eta|
  double kernel_residual = 0.0;       // max |G(xi f)(y) - eta G(f)(xi y)| / max(1, |G|)
  double residual_f = 0.0;            // max Landsberg residual of f over the samples
  double residual_xi_f = 0.0;         // same for xi f
  double condition_factor = 1.0;      // ||xi||^3
  bool f_is_solution = false;
  bool xi_f_is_solution = false;
  bool passed = false;                // kernel identity holds, and f solution => xi f solution
  int samples = 0;
};

/// Throws PreconditionError (naming the worst sample) if xi is not an isometry of the norm.
InvarianceReport invariance_check(const MinkowskiNorm& norm, const LinearMap& map, const FiberField& f,
                                  const std::vector<FiberVector>& samples, double tol = kSolutionTolerance,
                                  double kernel_tol = 1e-9);

/// Worst relative |F(xi y) - F(y)| over the deterministic sphere sequence.
double isometry_defect(const MinkowskiNorm& norm, const LinearMap& map, int samples, FiberVector* worst = nullptr);

}  // namespace finsler::landsberg
