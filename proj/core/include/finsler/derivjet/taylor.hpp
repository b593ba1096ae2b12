#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "finsler/derivjet/field.hpp"

namespace finsler::derivjet {

inline constexpr int kMaxXOrder = 1;
inline constexpr int kMaxYOrder = 5;

/// Orders of a mixed partial derivative, per chart and per fiber coordinate.
struct MultiOrder {
  std::vector<int> x_orders;
  std::vector<int> y_orders;

  int x_total() const;
  int y_total() const;
  std::string to_string() const;

  /// Order with `y_count` derivatives distributed over the listed y indices.
  static MultiOrder y(int n, std::initializer_list<int> y_indices);
  static MultiOrder xy(int n, std::initializer_list<int> x_indices, std::initializer_list<int> y_indices);

  auto operator<=>(const MultiOrder&) const = default;
};

enum class Method { jet, finite_difference };

struct PartialEntry {
  double value = 0.0;
  std::optional<double> error_estimate;
};

struct PartialTable {
  Method method = Method::jet;
  std::map<MultiOrder, PartialEntry> entries;

  double value(const MultiOrder& order) const;
};

/// Exact partial derivatives by truncated Taylor arithmetic.  Only the
/// coordinates that appear in the requested orders are seeded.
PartialTable taylor_eval(const ScalarField& field, const ChartPoint& base, const FiberVector& fiber,
                         const std::set<MultiOrder>& orders);

struct FdResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

inline constexpr double kDefaultFdStep = 1e-3;
inline constexpr int kDefaultRichardsonLevels = 2;

/// Central-difference tensor stencil with Richardson extrapolation, evaluated
/// in quad precision.  The step for coordinate c is step * max(1, |c|).
FdResult fd_partial(const ScalarField& field, const ChartPoint& base, const FiberVector& fiber,
                    const MultiOrder& order, double step = kDefaultFdStep,
                    int richardson_levels = kDefaultRichardsonLevels);

struct Sample {
  ChartPoint x;
  FiberVector y;
};

struct AgreementReport {
  double max_discrepancy = 0.0;
  std::size_t worst_sample = 0;
  MultiOrder worst_order;
  double rel_tol = 0.0;
  bool passed = true;
};

/// Jet versus finite differences for every sample and order, using
/// |a - b| / max(|a|, |b|, 1) as the discrepancy.
AgreementReport cross_check(const ScalarField& field, const std::vector<Sample>& samples,
                            const std::set<MultiOrder>& orders, double rel_tol, double step = kDefaultFdStep,
                            int richardson_levels = kDefaultRichardsonLevels);

/// All y-orders of total degree in [1, max_y_order] combined with x-orders of
/// degree <= max_x_order, for an n-dimensional chart.
std::set<MultiOrder> all_orders(int n, int max_x_order, int max_y_order);

}  // namespace finsler::derivjet
