#pragma once

#include <functional>
#include <memory>
#include <string>

#include "finsler/generic.hpp"
#include "finsler/metrics/expression.hpp"

namespace finsler::metrics {

/// L and its partials up to third order at one (s, t).
struct LPartials {
  double L = 0.0;
  double L1 = 0.0;
  double L2 = 0.0;
  double L11 = 0.0;
  double L12 = 0.0;
  double L22 = 0.0;
  double L111 = 0.0;
  double L112 = 0.0;
  double L122 = 0.0;
  double L222 = 0.0;
};

using PartialsClosure = std::function<LPartials(double s, double t)>;

/// The function L(s, t) of an (alpha1, alpha2)-metric F = sqrt(L(alpha1^2, alpha2^2)).
/// Partials come from jets, or from a user closure that is cross-checked
/// against the jets when the generator is built.
class Generator {
 public:
  static constexpr double kUserPartialsTolerance = 1e-9;

  Generator() = default;
  Generator(std::string name, GenericFunction<BivariateFn> L, PartialsClosure user_partials = {});

  const std::string& name() const noexcept { return name_; }

  template <class T>
  T operator()(const T& s, const T& t) const {
    return L_.template get<T>()(s, t);
  }

  LPartials partials(double s, double t) const;
  LPartials jet_partials(double s, double t) const;
  bool has_user_partials() const noexcept { return static_cast<bool>(user_); }

  /// d^{ds+dt} L / ds^ds dt^dt evaluated at jet arguments.
  Jet partial(int ds, int dt, const Jet& s, const Jet& t) const;

  /// True when every second partial stays below tol on a fixed probe set.
  bool is_linear(double tol = 1e-9) const;

  static Generator linear();
  /// s + t + eps * s t / (s + t).
  static Generator cross(double eps);
  static Generator from_expression(const std::string& text);
  /// "linear", "cross02", "cross:<eps>", "expr:<text>", or a bare expression.
  static Generator from_name(const std::string& name);

 private:
  std::string name_;
  GenericFunction<BivariateFn> L_;
  PartialsClosure user_;
};

}  // namespace finsler::metrics
