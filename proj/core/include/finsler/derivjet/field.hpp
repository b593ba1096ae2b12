#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "finsler/generic.hpp"
#include "finsler/point.hpp"

namespace finsler::derivjet {

/// Handle to a scalar field f(x, y) on the slit tangent bundle of an
/// n-dimensional chart.  The callable must be generic over the scalar type
/// and is evaluated with double, Quad or Jet arguments.
class ScalarField {
 public:
  using Domain = std::function<bool(std::span<const double>)>;

  ScalarField() = default;

  template <class F>
  ScalarField(int dimension, F f, Domain x_domain = {})
      : dimension_(dimension), fn_(std::move(f)), domain_(std::move(x_domain)) {}

  int dimension() const noexcept { return dimension_; }

  template <class T>
  T evaluate(std::span<const T> x, std::span<const T> y) const {
    return fn_.template get<T>()(x, y);
  }

  double operator()(const ChartPoint& x, const FiberVector& y) const { return evaluate<double>(x.span(), y.span()); }

  /// True when x lies in the chart domain (always true without a predicate).
  bool in_domain(std::span<const double> x) const { return !domain_ || domain_(x); }
  const Domain& domain() const noexcept { return domain_; }

 private:
  int dimension_ = 0;
  GenericFunction<XYScalarFn> fn_;
  Domain domain_;
};

}  // namespace finsler::derivjet
