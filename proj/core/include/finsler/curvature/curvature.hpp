#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/manifold/normal_chart.hpp"
#include "finsler/metrics/metric.hpp"
#include "finsler/point.hpp"
#include "finsler/tensor.hpp"

namespace finsler::curvature {

using metrics::MetricSpec;

struct FundamentalTensor {
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_inv;
  double det_g = 0.0;
  ChartPoint x;
  FiberVector y;
};

struct CartanData {
  Tensor3 C;                 // C_ijk = (1/4) d^3 F^2 / dy^i dy^j dy^k
  Eigen::VectorXd I_cov;     // I_k = d_{y^k} ln sqrt(det g)
  Eigen::VectorXd I_contra;  // I^l = g^{lk} I_k
};

struct SprayData {
  Eigen::VectorXd G_contra;  // G^i
  Eigen::VectorXd G_cov;     // G_l = (1/4)([F^2]_{x^k y^l} y^k - [F^2]_{x^l})
};

struct CurvatureTensors {
  Tensor4 berwald;    // B^i_pqr, entry (i, p, q, r)
  Tensor3 landsberg;  // y^j g_ij B^i_pqr
  double max_berwald = 0.0;
  double max_landsberg = 0.0;
  std::string method;  // "jet" or "fd-spray"
};

struct VolumeDistortion {
  double sigma = 0.0;
  double tau = 0.0;  // only set by tau()
  double omega_n = 0.0;
  int quadrature_nodes = 0;
  double refinement_change = 0.0;  // |sigma(N) - sigma(2N)| / sigma(N)
  std::optional<std::string> warning;
};

struct SCurvatureDirect {
  double S = 0.0;
  double log_det_term = 0.0;    // y^i d_{x^i} ln sqrt(det g)
  double log_sigma_term = 0.0;  // y^i d_{x^i} ln sigma
  double spray_term = 0.0;      // 2 G^i I_i
  double sigma = 0.0;
  std::optional<std::string> warning;
};

struct SCurvatureTerms {
  double Phi = 0.0;
  double Psi = 0.0;
  double A1 = 0.0;
  double A2 = 0.0;
  double S_formula = 0.0;
};

struct IdentityCheck {
  bool holds = false;
  double max_violation = 0.0;
};

inline constexpr double kDefaultSigmaStep = 1e-4;
inline constexpr double kSprayFdStep = 1e-3;
inline constexpr double kRefinementTolerance = 1e-8;

/// Default node count: 1024 on the circle, 64 x 128 on the sphere.
int default_nodes(int n);

/// Volume of the Euclidean unit ball in R^n.
double unit_ball_volume(int n);

/// Inverse of a symmetric positive definite jet matrix: the Neumann series
/// sum_k (-g0^-1 N)^k g0^-1 around g0 = g(y0), exact to the jets' degree.
/// Throws ConvexityError when g0 is not positive definite.
SmallMatrix<Jet> jet_inverse(const SmallMatrix<Jet>& g);

/// [F^2]_{x^l}(x, y), l = 1..n, by jets.
Eigen::VectorXd squared_norm_x_gradient(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y);

/// Throws ConvexityError when g is not positive definite.
FundamentalTensor fundamental_tensor(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y);
CartanData cartan_tensor(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y);
SprayData spray(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y);

/// Berwald and Landsberg tensors by jets end to end, with g^-1 expanded as a
/// Neumann series around its value at y.
CurvatureTensors berwald_landsberg_tensors(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y);

/// Same tensors from third central differences of the spray (one Richardson
/// level); the cross-check path.
CurvatureTensors berwald_landsberg_fd(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y,
                                      double step = kSprayFdStep);

/// Busemann-Hausdorff density for n = 2 (trapezoid on the circle) and n = 3
/// (Gauss-Legendre in cos(theta) times trapezoid in phi).  nodes = 0 picks the default.
VolumeDistortion bh_density(const MetricSpec& spec, const ChartPoint& x, int nodes = 0);

/// tau = ln(sqrt(det g) / sigma), with sigma from bh_density.
VolumeDistortion tau(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y, int nodes = 0);

/// Gradient of ln sigma by central differences at fixed quadrature nodes.
Eigen::VectorXd log_sigma_gradient(const MetricSpec& spec, const ChartPoint& x, double step = kDefaultSigmaStep,
                                   int nodes = 0);

/// S = y^i d_{x^i} tau - 2 G^i d_{y^i} tau.
SCurvatureDirect s_curvature_direct(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y,
                                    double fd_step = kDefaultSigmaStep, int nodes = 0);

/// The same S with d ln sigma supplied, for callers that sweep many y at one x.
/// sigma and warning are left unset.
SCurvatureDirect s_curvature_at(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y,
                                const Eigen::VectorXd& log_sigma_grad);

/// S at y = (a, 0, ..., 0, a') in a normal chart, from L's partials and (A1, A2).
/// Needs a^2 + a'^2 = 1 and a, a' != 0; L1 L2 - 2 L L12 <= 0 raises DegenerateDenominatorError.
SCurvatureTerms s_curvature_formula(const MetricSpec& spec, const manifold::NormalChartReport& report, double a,
                                    double a_prime);

/// d_i b_jk + d_j b_ik = 0 for i <= j < n1 <= k and k < n1 <= i <= j (0-based).
IdentityCheck s_vanishing_identities(const manifold::NormalChartReport& report, double tol);

/// The fiber quantities of an (alpha1, alpha2)-metric at y = (a, 0, ..., 0, a')
/// in a normal chart with alpha(y) = 1, assembled from L's partials at (a^2, a'^2).
namespace closed_form {

using metrics::LPartials;

double det_2x2(const LPartials& p);  // L1 L2 - 2 L L12
Eigen::MatrixXd g(const LPartials& p, double a, double ap, int n1, int n2);
Eigen::MatrixXd g_inv(const LPartials& p, double a, double ap, int n1, int n2);
Tensor3 cartan(const LPartials& p, double a, double ap, int n1, int n2);
Eigen::VectorXd mean_cartan(const LPartials& p, double a, double ap, int n1, int n2);
/// I^l; `printed_denominator` uses L1 L2 - L L12 in I^n instead of L1 L2 - 2 L L12.
Eigen::VectorXd mean_cartan_contra(const LPartials& p, double a, double ap, int n1, int n2,
                                   bool printed_denominator = false);
/// (G_1, G_n).
std::pair<double, double> spray_cov(const LPartials& p, double a, double ap, double A1, double A2);
double Psi(const LPartials& p, double a, double ap, int n1, int n2);
double Phi(const LPartials& p, double a, double ap, int n1, int n2);

}  // namespace closed_form

struct SamplePlanEntry {
  ChartPoint x;
  int directions = 8;
};

struct BatchRow {
  ChartPoint x;
  FiberVector y;
  std::string quantity;
  double value = 0.0;
  std::string method;
  double error_estimate = 0.0;
};

/// Known quantities: g, det_g, C, I, G, berwald, landsberg, sigma, tau, S.
const std::vector<std::string>& batch_quantities();

/// One row per scalar entry of every requested quantity at every sample.
std::vector<BatchRow> batch_evaluate(const MetricSpec& spec, const std::vector<SamplePlanEntry>& plan,
                                     const std::vector<std::string>& quantities, int nodes = 0);

}  // namespace finsler::curvature
