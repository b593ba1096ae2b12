#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "finsler/curvature/curvature.hpp"
#include "finsler/landsberg/landsberg.hpp"
#include "finsler/manifold/model.hpp"
#include "finsler/metrics/metric.hpp"

namespace finsler::verify {

using manifold::ManifoldModel;
using metrics::MetricSpec;

/// Deterministic base points and fiber directions.
struct SamplePlan {
  std::vector<ChartPoint> points;
  int directions = 16;
  std::string sequence;  // names the low-discrepancy sequences used

  std::string describe() const;
};

/// `points` Halton points in a box of half-width `radius` around the model's
/// default point (the default point first), `directions` sphere directions each.
SamplePlan default_plan(const ManifoldModel& model, int points = 5, int directions = 16, double radius = 0.1);

// "Vanishing" means below max(kFloorFactor * control floor, the absolute minimum).
inline constexpr double kFloorFactor = 10.0;
inline constexpr double kTensorMinimum = 1e-9;
inline constexpr double kSMinimum = 1e-8;
inline constexpr double kTheorem41Relative = 1e-4;
inline constexpr double kTheorem41Absolute = 2e-5;
inline constexpr double kTheorem41Significant = 1e-3;
inline constexpr double kIdentityTolerance = 1e-8;

struct Residuals {
  double mean_cartan = 0.0;
  double berwald = 0.0;
  double landsberg = 0.0;
  double s = 0.0;
};

struct ClassificationReport {
  bool riemannian = false;
  bool berwald = false;
  bool landsberg = false;
  bool s_vanishing = false;
  Residuals residuals;
  Residuals noise_floor;  // the Riemannian control through the same pipeline
  Residuals tolerances;
  bool consistency_enforced = false;  // berwald forced landsberg or s_vanishing up
  std::string plan;
  int samples = 0;
};

/// Maximum residuals of one spec over a plan.  Evaluation failures are rethrown
/// with the failing sample attached.
Residuals max_residuals(const MetricSpec& spec, const SamplePlan& plan, int nodes = 0);

/// Needs at least 5 points and 16 directions.
ClassificationReport classify(const MetricSpec& spec, const SamplePlan& plan, int nodes = 0);

struct Theorem41Row {
  double a = 0.0;
  double a_prime = 0.0;
  double S_direct = 0.0;
  double S_formula = 0.0;
  double rel_err = 0.0;
  double abs_err = 0.0;
  bool passed = false;
};

struct Theorem41Report {
  std::vector<Theorem41Row> rows;
  double A1 = 0.0;
  double A2 = 0.0;
  bool passed = false;
};

/// Direct S against the closed form at y = (a, 0, ..., 0, a') in a normal chart at p.
/// Rows with |S_formula| > 1e-3 need rel_err < tol_rel, the others abs_err < 2e-5.
Theorem41Report verify_theorem41(const metrics::Generator& gen, const ManifoldModel& model, const ChartPoint& p,
                                 const std::vector<std::pair<double, double>>& directions,
                                 double tol_rel = kTheorem41Relative, int nodes = 0);

/// The (a, a') pairs used when none are given.
std::vector<std::pair<double, double>> default_directions();

struct Theorem42Row {
  ChartPoint p;
  bool identities_hold = false;
  double identity_violation = 0.0;
  double max_abs_S = 0.0;
  bool s_vanishes = false;
  bool agree = false;
};

struct Theorem42Report {
  std::vector<Theorem42Row> rows;
  double s_threshold = 0.0;
  bool passed = false;
};

/// Per point: the b-derivative identities against sampled |S| at `directions` fibers.
Theorem42Report verify_theorem42(const metrics::Generator& gen, const ManifoldModel& model,
                                 const std::vector<ChartPoint>& points, double tol = kIdentityTolerance,
                                 int directions = 16, int nodes = 0);

struct Check {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct CheckReport {
  std::vector<Check> checks;
  bool passed = false;
};

/// |value - expected| <= tolerance.
Check near(std::string name, double value, double expected, double tolerance);
/// value > threshold.
Check above(std::string name, double value, double threshold);
CheckReport collect(std::vector<Check> checks);

/// Polar plane normal chart: |A1| = 1/r0, A2 = 0, the normal-chart derivative identities, not Berwald.
CheckReport verify_example33(double r0 = 1.0);

/// Hopf sphere at the identity: the zero pattern of db, |d_1 b_23| = |d_2 b_13| = 1
/// with opposite signs, not Berwald.
CheckReport verify_example34();

/// lemma31_check at the default point of every model given.
CheckReport verify_lemma31(const std::vector<ManifoldModel>& models, double tol = kIdentityTolerance);

/// berwald_criterion against the classification's Berwald flag, per model.
CheckReport verify_prop32(const metrics::Generator& gen, const std::vector<ManifoldModel>& models, int nodes = 0);

/// "identity", "block-rotation:<deg>deg", "reflection:<i,j,...>" (1-based) or
/// "matrix:<row-major entries>".
landsberg::LinearMap parse_linear_map(const std::string& text, int n1, int n2);

/// Kernel identity and linearity for the given maps on the norm frozen at a
/// normal-chart center of `model`, with f the canonical field there.
CheckReport verify_lemma51(const metrics::Generator& gen, const ManifoldModel& model,
                           const std::vector<landsberg::LinearMap>& maps, int fibers = 20);

struct IndicatrixTrace {
  std::vector<double> angles;
  std::vector<FiberVector> points;    // Y_t, F(Y_t) = 1
  std::vector<FiberVector> tangents;  // U_t, g_{Y_t}(U_t, U_t) = 1
  std::vector<double> trace;          // c(t) = C_{Y_t}(U_t, U_t, U_t)
};

/// Needs n = 2 and num_angles >= 64; t_k = 2 pi k / num_angles.
IndicatrixTrace indicatrix_cartan_trace(const metrics::MinkowskiNorm& norm, int num_angles = 256);

struct Lemma81Certificate {
  double max_landsberg = 0.0;
  double noise_floor = 0.0;
  double threshold = 0.0;
  ChartPoint witness_p;
  FiberVector witness_y;
  bool trace_nonconstant = false;
  double trace_spread = 0.0;
  double max_axis_trace = 0.0;
  bool passed = false;
};

/// Landsberg residual of the polar plane metric over a sample grid, plus the
/// indicatrix trace of its norm at a normal-chart center.  A linear generator
/// raises PreconditionError.
Lemma81Certificate lemma81_certificate(const metrics::Generator& gen, double r0 = 1.0, double tol = 1e-9);

}  // namespace finsler::verify
