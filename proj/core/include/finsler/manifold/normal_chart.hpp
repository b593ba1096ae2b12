#pragma once

#include <optional>

#include "finsler/errors.hpp"
#include "finsler/manifold/model.hpp"
#include "finsler/point.hpp"
#include "finsler/tensor.hpp"

namespace finsler::manifold {

/// First x-derivatives of a matrix field at x: d(k, i, j) = d_k m_ij.
Tensor3 matrix_derivatives(const MatrixField& field, const ChartPoint& x);

/// Christoffel symbols Gamma(i, j, k) = Gamma^i_jk of alpha at x.
Tensor3 christoffel(const ManifoldModel& model, const ChartPoint& x);

struct NormalChartReport {
  ChartPoint p;  // center, old chart
  int n1 = 0;
  int n2 = 0;
  ChartMap chart_map;
  ManifoldModel chart_model;  // the geometry in the new coordinates, centered at 0
  Tensor3 da;                 // d_k (alpha_1 block)_ij at the center
  Tensor3 db;                 // d_k b_ij at the center
  Tensor3 f_first_order;      // d_k f_i^j, i < n1 <= j (0-based), zero elsewhere
  double A1 = 0.0;            // d_1 b_1n
  double A2 = 0.0;            // d_n b_1n
  std::optional<FiberVector> aligned;  // new-chart components of the align vector
  double alpha_deviation = 0.0;        // max |alpha(0) - I|
  double christoffel_residual = 0.0;   // max |Gamma(0)| in the new chart
};

/// Normal chart at p: an alpha-orthonormal frame adapted to V1 + V2 (Gram-Schmidt
/// inside each subbundle), rotated within O(n1) x O(n2) so that `align` maps to
/// (a, 0, ..., 0, a'), followed by the quadratic correction that kills the
/// Christoffel symbols at p.
NormalChartReport normal_chart(const ManifoldModel& model, const ChartPoint& p,
                               const std::optional<FiberVector>& align = std::nullopt);

struct Lemma31Report {
  double alpha_violation = 0.0;   // |d_k a_ij + d_k b_ij|
  double block_violation = 0.0;   // |d_k b_ij| inside a block
  double cross_violation = 0.0;   // |d_k b_ij + d_k f_i^j| across blocks
  double max_violation = 0.0;
  bool passed = false;
};

Lemma31Report lemma31_check(const ManifoldModel& model, const NormalChartReport& report, double tol);

/// True iff every cross-block first derivative d_k b_ij (i in V1, j in V2) is below tol.
bool berwald_criterion(const NormalChartReport& report, double tol);

inline constexpr double kChartTolerance = 1e-7;
inline constexpr double kProjectorTolerance = 1e-10;

}  // namespace finsler::manifold
