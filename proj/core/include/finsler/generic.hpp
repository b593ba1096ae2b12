#pragma once

// Type erasure for callables that are generic over the toolkit's scalars.
// A generic lambda is captured once and instantiated for double, Quad and
// Jet, so the same field feeds the jet engine, the quad-precision finite
// difference oracle and plain double evaluation.

#include <functional>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "finsler/scalar.hpp"
#include "finsler/small_matrix.hpp"

namespace finsler {

template <template <class> class Signature>
class GenericFunction {
 public:
  GenericFunction() = default;

  template <class F, class = std::enable_if_t<!std::is_same_v<std::decay_t<F>, GenericFunction>>>
  explicit GenericFunction(F f) : d_(f), q_(f), j_(std::move(f)) {}

  explicit operator bool() const noexcept { return static_cast<bool>(d_); }

  template <class T>
  const std::function<Signature<T>>& get() const {
    if constexpr (std::is_same_v<T, double>) {
      return d_;
    } else if constexpr (std::is_same_v<T, Quad>) {
      return q_;
    } else {
      static_assert(std::is_same_v<T, Jet>, "unsupported scalar");
      return j_;
    }
  }

 private:
  std::function<Signature<double>> d_;
  std::function<Signature<Quad>> q_;
  std::function<Signature<Jet>> j_;
};

template <class T>
using MatrixFn = SmallMatrix<T>(std::span<const T>);
template <class T>
using VectorFn = std::vector<T>(std::span<const T>);
template <class T>
using XYScalarFn = T(std::span<const T>, std::span<const T>);
template <class T>
using YScalarFn = T(std::span<const T>);
template <class T>
using BivariateFn = T(const T&, const T&);
template <class T>
using UnivariateFn = T(const T&);

/// x -> n x n matrix.
using MatrixField = GenericFunction<MatrixFn>;
/// x -> vector (one-forms, vector fields).
using VectorField = GenericFunction<VectorFn>;

}  // namespace finsler
