#pragma once

/**
 * @file jet.hpp
 * @brief Truncated multivariate Taylor series ("jets") in forward mode.
 *
 * A Jet stores the Taylor coefficients of a scalar quantity around an
 * expansion point, in a fixed set of perturbation variables.  Arithmetic and
 * the elementary functions act on the coefficient arrays directly, so every
 * partial derivative that survives the truncation is exact up to rounding.
 *
 * Truncation is described by a JetSpace: variables are split into groups and
 * each group carries a cap on its total degree (for example "at most one
 * x-derivative and at most five y-derivatives").  The retained monomials are
 * closed under taking divisors, which makes the truncated product well defined.
 */

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace finsler::derivjet {

class JetSpace {
 public:
  struct ProductTerm {
    std::uint32_t lhs;
    std::uint32_t rhs;
    std::uint32_t out;
  };

  /// group_of_var[v] names the group of variable v; group_caps[g] is the
  /// largest total degree kept within group g (at most 7).
  static std::shared_ptr<const JetSpace> make(std::vector<int> group_of_var,
                                              std::vector<int> group_caps);

  /// All variables in one group with total degree <= cap.
  static std::shared_ptr<const JetSpace> uniform(int num_vars, int cap);

  int num_vars() const noexcept { return static_cast<int>(group_of_var_.size()); }
  std::size_t size() const noexcept { return degrees_.size(); }
  int max_degree() const noexcept { return max_degree_; }
  int group_of(int var) const { return group_of_var_.at(static_cast<std::size_t>(var)); }
  int group_cap(int group) const { return group_caps_.at(static_cast<std::size_t>(group)); }

  std::span<const std::uint8_t> exponents(std::size_t index) const;
  int degree(std::size_t index) const { return degrees_[index]; }

  /// Product of factorials of the exponents, i.e. the factor between a
  /// Taylor coefficient and the corresponding partial derivative.
  double factorial_weight(std::size_t index) const { return factorial_weight_[index]; }

  std::optional<std::size_t> find(std::span<const int> exponents) const;

  /// Index of the monomial v (degree one in variable `var`).
  std::size_t linear_index(int var) const;

  /// (lhs, rhs, out) triples with exps(lhs) + exps(rhs) == exps(out), sorted
  /// by out, then lhs.  Products are accumulated in this fixed order.
  std::span<const ProductTerm> product_terms() const noexcept { return product_terms_; }

 private:
  JetSpace() = default;
  std::uint64_t key_of(std::span<const std::uint8_t> exps) const;

  std::vector<int> group_of_var_;
  std::vector<int> group_caps_;
  std::vector<std::uint8_t> exponents_;  // size() rows of num_vars() entries
  std::vector<int> degrees_;
  std::vector<double> factorial_weight_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_of_key_;
  std::vector<ProductTerm> product_terms_;
  int max_degree_ = 0;
};

using JetSpacePtr = std::shared_ptr<const JetSpace>;

/// A truncated Taylor series.  A Jet without a space is a plain constant and
/// promotes itself when combined with a jet that has one.
class Jet {
 public:
  Jet() = default;
  Jet(double constant) : c_{constant} {}  // NOLINT: implicit by design of generic code
  Jet(JetSpacePtr space, double constant);

  static Jet variable(JetSpacePtr space, int var, double value);

  const JetSpacePtr& space() const noexcept { return space_; }
  bool has_space() const noexcept { return static_cast<bool>(space_); }
  double value() const noexcept { return c_[0]; }
  std::span<const double> coefficients() const noexcept { return c_; }
  double coefficient(std::size_t index) const { return c_.at(index); }

  /// Partial derivative at the expansion point for the given exponents;
  /// zero when the monomial is not part of the space.
  double partial(std::span<const int> exponents) const;

  /// Copy with the constant term removed (the nilpotent part).
  Jet nilpotent() const;

  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator*=(const Jet& other);
  Jet& operator/=(const Jet& other);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator-(Jet a);
  friend Jet operator+(const Jet& a) { return a; }

 private:
  friend Jet compose(const Jet& x, std::span<const double> taylor);
  friend Jet derive_into(const Jet&, std::span<const int>, const JetSpacePtr&, std::span<const int>);
  friend Jet compose2(const Jet& u, const Jet& v, const Jet& taylor);
  void promote_to(const JetSpacePtr& space);

  JetSpacePtr space_;
  std::vector<double> c_{0.0};
};

/// Evaluates sum_k taylor[k] * (x - x(0))^k.  `taylor` holds the normalized
/// Taylor coefficients f^(k)(x0)/k! of an outer function at x0 = x.value().
Jet compose(const Jet& x, std::span<const double> taylor);

/// Re-expands the partial derivative d^shift(source) in `target`.  Target
/// variable v corresponds to source variable var_map[v]; source variables
/// that are not mapped are set to their expansion point.  A negative entry
/// marks a target variable the source does not depend on.
Jet derive_into(const Jet& source, std::span<const int> shift, const JetSpacePtr& target,
                std::span<const int> var_map);

/// Bivariate composition f(u, v) where `taylor` is a jet of f in a two-variable
/// uniform space expanded at (u.value(), v.value()).
Jet compose2(const Jet& u, const Jet& v, const Jet& taylor);

Jet sqrt(const Jet& x);
Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet sin(const Jet& x);
Jet cos(const Jet& x);
Jet pow(const Jet& x, double exponent);
Jet pow(const Jet& x, int exponent);
Jet reciprocal(const Jet& x);

inline double primal(const Jet& x) noexcept { return x.value(); }

}  // namespace finsler::derivjet
