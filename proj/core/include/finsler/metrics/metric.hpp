#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "finsler/derivjet/field.hpp"
#include "finsler/errors.hpp"
#include "finsler/generic.hpp"
#include "finsler/manifold/model.hpp"
#include "finsler/metrics/generator.hpp"
#include "finsler/point.hpp"

namespace finsler::metrics {

using manifold::ManifoldModel;

enum class MetricKind { riemannian, randers, alpha_beta, alpha1_alpha2, raw };

std::string to_string(MetricKind kind);

/// Coefficient fields of a metric evaluated at one chart point.
template <class T>
struct Geometry {
  SmallMatrix<T> alpha;
  SmallMatrix<T> b;
  std::vector<T> beta;
};

/// A Minkowski norm: a metric frozen at one base point.  F^2 is generic over
/// the scalar type so it feeds jets, quad precision and plain doubles.
class MinkowskiNorm {
 public:
  MinkowskiNorm() = default;
  MinkowskiNorm(int dimension, GenericFunction<YScalarFn> squared, std::string name = {})
      : n_(dimension), f2_(std::move(squared)), name_(std::move(name)) {}

  int dimension() const noexcept { return n_; }
  const std::string& name() const noexcept { return name_; }

  template <class T>
  T squared(std::span<const T> y) const {
    return f2_.template get<T>()(y);
  }
  double squared(const FiberVector& y) const { return squared<double>(y.span()); }
  double operator()(const FiberVector& y) const;

  /// Jet of F^2 in the fiber variables around y, all partials up to `cap`.
  Jet jet(const FiberVector& y, int cap) const;

  /// The norm as an x-independent field on an n-dimensional chart.
  derivjet::ScalarField as_field() const;

 private:
  int n_ = 0;
  GenericFunction<YScalarFn> f2_;
  std::string name_;
};

/// A Finsler metric family bound to its coefficient fields.
class MetricSpec {
 public:
  MetricSpec() = default;

  static MetricSpec riemannian(ManifoldModel model);
  /// F = alpha + beta.
  static MetricSpec randers(ManifoldModel model, VectorField beta, std::string beta_name = "beta");
  /// F = alpha phi(beta / alpha).
  static MetricSpec alpha_beta(ManifoldModel model, VectorField beta, GenericFunction<UnivariateFn> phi,
                               std::string name = "alpha-beta");
  /// F = sqrt(L(alpha1^2, alpha2^2)).
  static MetricSpec alpha1_alpha2(ManifoldModel model, Generator generator);
  /// F^2 given directly as a field; used for test norms outside the families.
  static MetricSpec raw(std::string name, int dimension, GenericFunction<XYScalarFn> squared_norm,
                        manifold::Domain domain = {});

  MetricKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  int dimension() const noexcept { return n_; }
  const ManifoldModel& model() const noexcept { return model_; }
  const Generator& generator() const;
  bool in_domain(std::span<const double> x) const { return model_.in_domain(x); }

  template <class T>
  Geometry<T> geometry(std::span<const T> x) const {
    Geometry<T> g;
    if (kind_ == MetricKind::raw) return g;
    g.alpha = model_.template alpha<T>(x);
    if (kind_ == MetricKind::alpha1_alpha2) g.b = model_.template b<T>(x);
    if (kind_ == MetricKind::randers || kind_ == MetricKind::alpha_beta) g.beta = beta_.template get<T>()(x);
    return g;
  }

  /// F^2 at fiber y given precomputed coefficients (not for raw specs).
  template <class T, class M>
  T squared_norm_at(const Geometry<M>& g, std::span<const T> y) const {
    switch (kind_) {
      case MetricKind::riemannian: return quadratic_form<M, T>(g.alpha, y);
      case MetricKind::randers: {
        const T alpha = math::sqrt(quadratic_form<M, T>(g.alpha, y));
        return math::square(alpha + dot<M, T>(g.beta, y));
      }
      case MetricKind::alpha_beta: {
        const T alpha2 = quadratic_form<M, T>(g.alpha, y);
        const T r = dot<M, T>(g.beta, y) / math::sqrt(alpha2);
        return alpha2 * math::square(phi_.template get<T>()(r));
      }
      case MetricKind::alpha1_alpha2: {
        const T t = quadratic_form<M, T>(g.b, y);
        const T s = quadratic_form<M, T>(g.alpha, y) - t;
        return generator_(s, t);
      }
      case MetricKind::raw: break;
    }
    throw std::logic_error("squared_norm_at: raw metric has no geometry");
  }

  template <class T>
  T squared_norm(std::span<const T> x, std::span<const T> y) const {
    if (kind_ == MetricKind::raw) return raw_.template get<T>()(x, y);
    return squared_norm_at<T, T>(geometry<T>(x), y);
  }

  /// (alpha1^2, alpha2^2) at (x, y); alpha1_alpha2 specs only.
  std::pair<double, double> st(const ChartPoint& x, const FiberVector& y) const;

  derivjet::ScalarField squared_norm_field() const;
  MinkowskiNorm frozen(const ChartPoint& x) const;

  /// The same metric in the coordinates z of a chart map.
  MetricSpec in_chart(const manifold::ChartMap& map) const;

  /// Same family and generator on another model (alpha1_alpha2 and riemannian).
  MetricSpec with_model(ManifoldModel model) const;

 private:
  template <class M, class T>
  static T dot(const std::vector<M>& b, std::span<const T> y) {
    T acc = T(0.0);
    for (std::size_t i = 0; i < b.size(); ++i) acc += b[i] * y[i];
    return acc;
  }

  MetricKind kind_ = MetricKind::riemannian;
  std::string name_;
  int n_ = 0;
  ManifoldModel model_;
  Generator generator_;
  VectorField beta_;
  GenericFunction<UnivariateFn> phi_;
  GenericFunction<XYScalarFn> raw_;
};

/// F(x, y).  Zero fiber or a point outside the chart -> DomainError;
/// L(s, t) <= 0 (or F^2 <= 0) -> InvalidGeneratorError.
double norm_value(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y);

struct ValidationReport {
  bool positivity_ok = true;
  bool homogeneity_ok = true;
  bool convexity_ok = true;
  double min_hessian_eigenvalue = 0.0;
  double homogeneity_residual_max = 0.0;
  double euler_residual_max = 0.0;  // alpha1_alpha2 only
  FiberVector worst_direction;
  int num_directions = 0;
  double tol = 0.0;
  std::string sequence;

  bool passed() const { return positivity_ok && homogeneity_ok && convexity_ok; }
};

inline constexpr double kHomogeneityTolerance = 1e-10;

/// Minkowski-axiom scan over deterministic sphere directions at x.
ValidationReport validate_norm(const MetricSpec& spec, const ChartPoint& x, int num_directions, double tol);

/// g_ij = (1/2) d^2 F^2 / dy^i dy^j of a Minkowski norm.
Eigen::MatrixXd fiber_hessian(const MinkowskiNorm& norm, const FiberVector& y);

/// Built-in raw test norms: "quartic-test" = ((y1)^4 + (y2)^4)^(1/4) on R^2.
MetricSpec raw_test_metric(const std::string& name);

}  // namespace finsler::metrics
