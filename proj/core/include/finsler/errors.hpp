#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

/// Base of every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the domain of a field: zero fiber, chart point outside the
/// model's domain, stencil crossing the slit.
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedOrderError : public Error {
 public:
  using Error::Error;
};

/// Non-finite intermediate value during evaluation.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// L(s, t) <= 0 at a valid input, or mismatching user-supplied partials.
class InvalidGeneratorError : public Error {
 public:
  using Error::Error;
};

/// Fundamental tensor singular or not positive definite.
class ConvexityError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// Manifold model violating its invariants (projector rank, symmetry).
class ModelError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// L1 L2 - 2 L L12 <= 0 in the closed-form S-curvature.
class DegenerateDenominatorError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace finsler
