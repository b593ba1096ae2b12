#include "finsler/sampling.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace finsler {

namespace {
constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};
}

std::vector<double> halton(int index, int dims) {
  if (dims > static_cast<int>(std::size(kPrimes))) throw std::invalid_argument("halton: too many dimensions");
  std::vector<double> out(static_cast<std::size_t>(dims));
  for (int d = 0; d < dims; ++d) {
    const int base = kPrimes[d];
    double f = 1.0;
    double r = 0.0;
    for (int i = index; i > 0; i /= base) {
      f /= base;
      r += f * (i % base);
    }
    out[static_cast<std::size_t>(d)] = r;
  }
  return out;
}

std::string sphere_sequence_name(int n) {
  if (n == 2) return "circle-equispaced";
  if (n == 3) return "fibonacci-sphere";
  return "halton-gaussian";
}

std::vector<FiberVector> sphere_directions(int n, int count) {
  if (n < 2 || count < 1) throw std::invalid_argument("sphere_directions: need n >= 2 and count >= 1");
  std::vector<FiberVector> out;
  out.reserve(static_cast<std::size_t>(count));
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double t = 2.0 * std::numbers::pi * k / count;
      out.push_back(FiberVector{std::cos(t), std::sin(t)});
    }
    return out;
  }
  if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * k;
      out.push_back(FiberVector{r * std::cos(phi), r * std::sin(phi), z});
    }
    return out;
  }
  for (int k = 1; static_cast<int>(out.size()) < count; ++k) {
    const auto h = halton(k, n);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = std::sqrt(2.0) * boost::math::erf_inv(2.0 * h[static_cast<std::size_t>(i)] - 1.0);
    const double norm = v.norm();
    if (norm > 1e-6) out.emplace_back(v / norm);
  }
  return out;
}

}  // namespace finsler
