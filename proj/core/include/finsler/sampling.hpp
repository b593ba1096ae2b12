#pragma once

// Deterministic sample sequences.  Every report built from these is
// reproducible bit-for-bit; the sequence name is recorded alongside.

#include <string>
#include <vector>

#include "finsler/point.hpp"

namespace finsler {

/// Unit directions in R^n: equally spaced angles 2 pi k / count for n = 2
/// (the axes are included when 4 divides count), a Fibonacci lattice for
/// n = 3, and Halton points pushed through the normal quantile otherwise.
std::vector<FiberVector> sphere_directions(int n, int count);

/// Name of the sequence used by sphere_directions for dimension n.
std::string sphere_sequence_name(int n);

/// Halton point `index` (starting at 1) in [0, 1)^dims.
std::vector<double> halton(int index, int dims);

/// Points p + radius * (Halton in [-1, 1]^n), kept inside `keep`.
template <class Keep>
std::vector<ChartPoint> points_around(const ChartPoint& p, double radius, int count, Keep keep) {
  std::vector<ChartPoint> out;
  out.push_back(p);
  for (int i = 1; static_cast<int>(out.size()) < count && i < 100 * count; ++i) {
    const auto h = halton(i, p.dimension());
    Eigen::VectorXd x = p.coords;
    for (int k = 0; k < p.dimension(); ++k) x(k) += radius * (2.0 * h[static_cast<std::size_t>(k)] - 1.0);
    if (keep(x)) out.emplace_back(x);
  }
  return out;
}

}  // namespace finsler
