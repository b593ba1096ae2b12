#include "finsler/curvature/curvature.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>

#include "finsler/sampling.hpp"

namespace finsler::curvature {

namespace {

using derivjet::JetSpace;
using derivjet::JetSpacePtr;

void check_sample(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y) {
  const int n = spec.dimension();
  if (x.dimension() != n || y.dimension() != n) throw DomainError("curvature: dimension mismatch");
  if (y.is_zero()) throw DomainError("curvature: zero fiber");
  if (!spec.in_domain(x.span())) throw DomainError("curvature: base point outside the chart domain");
}

Jet embed(const Jet& j, const JetSpacePtr& full, int n) {
  if (!j.has_space()) return j;
  std::vector<int> shift(static_cast<std::size_t>(n), 0);
  std::vector<int> map(static_cast<std::size_t>(2 * n), -1);
  for (int i = 0; i < n; ++i) map[static_cast<std::size_t>(i)] = i;
  return derivjet::derive_into(j, shift, full, map);
}

SmallMatrix<Jet> embed(const SmallMatrix<Jet>& m, const JetSpacePtr& full, int n) {
  SmallMatrix<Jet> out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = embed(m(i, j), full, n);
  return out;
}

// Jet of F^2 in (x^1..x^n, y^1..y^n), degree <= 1 in x and <= ycap in y.
// The coefficient fields are expanded in x alone and then embedded, so the
// chart geometry is never evaluated with fiber variables attached.
Jet point_jet(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y, int ycap) {
  const int n = spec.dimension();
  std::vector<int> groups(static_cast<std::size_t>(2 * n), 1);
  for (int i = 0; i < n; ++i) groups[static_cast<std::size_t>(i)] = 0;
  const auto full = JetSpace::make(groups, {1, ycap});
  std::vector<Jet> yj;
  for (int i = 0; i < n; ++i) yj.push_back(Jet::variable(full, n + i, y.coords(i)));
  if (spec.kind() == metrics::MetricKind::raw) {
    std::vector<Jet> xj;
    for (int i = 0; i < n; ++i) xj.push_back(Jet::variable(full, i, x.coords(i)));
    return spec.squared_norm<Jet>(std::span<const Jet>(xj), std::span<const Jet>(yj));
  }
  const auto xspace = JetSpace::uniform(n, 1);
  std::vector<Jet> xj;
  for (int i = 0; i < n; ++i) xj.push_back(Jet::variable(xspace, i, x.coords(i)));
  auto geo = spec.geometry<Jet>(std::span<const Jet>(xj));
  metrics::Geometry<Jet> g;
  if (geo.alpha.rows() > 0) g.alpha = embed(geo.alpha, full, n);
  if (geo.b.rows() > 0) g.b = embed(geo.b, full, n);
  for (const auto& b : geo.beta) g.beta.push_back(embed(b, full, n));
  return spec.squared_norm_at<Jet, Jet>(g, std::span<const Jet>(yj));
}

// d^{ex x + ey y} of the point jet, re-expanded in the fiber variables
Jet fiber_part(const Jet& f2, int n, const std::vector<int>& shift, const JetSpacePtr& yspace) {
  std::vector<int> map(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) map[static_cast<std::size_t>(i)] = n + i;
  return derivjet::derive_into(f2, shift, yspace, map);
}

std::vector<int> shift_of(int n, std::initializer_list<int> xs, std::initializer_list<int> ys) {
  std::vector<int> e(static_cast<std::size_t>(2 * n), 0);
  for (int i : xs) ++e[static_cast<std::size_t>(i)];
  for (int i : ys) ++e[static_cast<std::size_t>(n + i)];
  return e;
}

double partial_of(const Jet& j, int n, std::initializer_list<int> vars) {
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  for (int v : vars) ++e[static_cast<std::size_t>(v)];
  return j.partial(e);
}

Eigen::LLT<Eigen::MatrixXd> factor(const Eigen::MatrixXd& g) {
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success || !g.allFinite()) {
    throw ConvexityError("fundamental tensor is not positive definite");
  }
  return llt;
}

// Everything the fiber-side formulas need at one (x, y).
struct FiberJets {
  int n = 0;
  JetSpacePtr yspace;
  SmallMatrix<Jet> g;     // g_ij(y) to degree ycap - 2
  std::vector<Jet> Gcov;  // G_l(y) to degree ycap - 2
  Eigen::MatrixXd g0;
  Eigen::MatrixXd dg_dx[8];  // d_{x^k} g_ij at y, when requested
};

FiberJets fiber_jets(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y, int ycap, bool with_dx) {
  const int n = spec.dimension();
  const Jet f2 = point_jet(spec, x, y, ycap);
  FiberJets fj;
  fj.n = n;
  fj.yspace = JetSpace::uniform(n, ycap - 2);
  fj.g = SmallMatrix<Jet>(n, n);
  fj.g0 = Eigen::MatrixXd(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      fj.g(i, j) = fiber_part(f2, n, shift_of(n, {}, {i, j}), fj.yspace) * 0.5;
      fj.g(j, i) = fj.g(i, j);
      fj.g0(i, j) = fj.g0(j, i) = fj.g(i, j).value();
    }
  std::vector<Jet> yv;
  for (int k = 0; k < n; ++k) yv.push_back(Jet::variable(fj.yspace, k, y.coords(k)));
  for (int l = 0; l < n; ++l) {
    Jet acc = fiber_part(f2, n, shift_of(n, {l}, {}), fj.yspace) * -1.0;
    for (int k = 0; k < n; ++k) acc += fiber_part(f2, n, shift_of(n, {k}, {l}), fj.yspace) * yv[static_cast<std::size_t>(k)];
    fj.Gcov.push_back(acc * 0.25);
  }
  if (with_dx) {
    if (n > 8) throw PreconditionError("curvature: dimension above 8 is not supported");
    for (int k = 0; k < n; ++k) {
      fj.dg_dx[k] = Eigen::MatrixXd(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          const auto s = shift_of(n, {k}, {i, j});
          fj.dg_dx[k](i, j) = fj.dg_dx[k](j, i) = 0.5 * f2.partial(s);
        }
    }
  }
  return fj;
}

// g^-1 as a truncated Neumann series around g(y0); exact to the jet's degree
SmallMatrix<Jet> inverse_series(const SmallMatrix<Jet>& g, const Eigen::MatrixXd& g0inv, int degree) {
  const int n = g.rows();
  const auto c = from_eigen<Jet>(g0inv);
  SmallMatrix<Jet> nil(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) nil(i, j) = -g(i, j).nilpotent();
  const auto m = c * nil;
  SmallMatrix<Jet> term = c;
  SmallMatrix<Jet> sum = c;
  for (int k = 1; k <= degree; ++k) {
    term = m * term;
    sum = sum + term;
  }
  return sum;
}

double sigma_at(const metrics::MinkowskiNorm& norm, int n, int nodes) {
  if (n == 2) {
    double vol = 0.0;
    const double h = 2.0 * std::numbers::pi / nodes;
    for (int k = 0; k < nodes; ++k) {
      const double phi = h * k;
      const double f = norm(FiberVector{std::cos(phi), std::sin(phi)});
      vol += std::pow(f, -2.0);
    }
    vol *= 0.5 * h;
    return unit_ball_volume(2) / vol;
  }
  const int nmu = std::max(1, static_cast<int>(std::lround(std::sqrt(nodes / 2.0))));
  const int nphi = 2 * nmu;
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(nmu)), gsl_integration_glfixed_table_free);
  double vol = 0.0;
  const double h = 2.0 * std::numbers::pi / nphi;
  for (int i = 0; i < nmu; ++i) {
    double mu = 0.0;
    double w = 0.0;
    gsl_integration_glfixed_point(-1.0, 1.0, static_cast<std::size_t>(i), &mu, &w, table.get());
    const double rho = std::sqrt(1.0 - mu * mu);
    double ring = 0.0;
    for (int k = 0; k < nphi; ++k) {
      const double phi = h * k;
      const double f = norm(FiberVector{rho * std::cos(phi), rho * std::sin(phi), mu});
      ring += std::pow(f, -3.0);
    }
    vol += w * ring * h;
  }
  return unit_ball_volume(3) / (vol / 3.0);
}

void check_nodes(int n, int nodes) {
  if (n != 2 && n != 3) throw PreconditionError("bh_density: quadrature is implemented for n = 2 and n = 3");
  if ((n == 2 && nodes < 64) || (n == 3 && nodes < 32 * 32)) {
    throw PreconditionError("bh_density: need at least 64 nodes (n = 2) or 32^2 nodes (n = 3)");
  }
}

}  // namespace

SmallMatrix<Jet> jet_inverse(const SmallMatrix<Jet>& g) {
  const auto llt = factor(primal_matrix(g));
  const int n = g.rows();
  int degree = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (g(i, j).has_space()) degree = std::max(degree, g(i, j).space()->max_degree());
  return inverse_series(g, llt.solve(Eigen::MatrixXd::Identity(n, n)), degree);
}

Eigen::VectorXd squared_norm_x_gradient(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y) {
  check_sample(spec, x, y);
  const int n = spec.dimension();
  const Jet f2 = point_jet(spec, x, y, 1);
  Eigen::VectorXd out(n);
  for (int l = 0; l < n; ++l) out(l) = f2.partial(shift_of(n, {l}, {}));
  return out;
}

int default_nodes(int n) { return n == 2 ? 1024 : 64 * 128; }

double unit_ball_volume(int n) { return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0); }

FundamentalTensor fundamental_tensor(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y) {
  check_sample(spec, x, y);
  const auto norm = spec.frozen(x);
  FundamentalTensor t;
  t.g = metrics::fiber_hessian(norm, y);
  const auto llt = factor(t.g);
  t.g_inv = llt.solve(Eigen::MatrixXd::Identity(spec.dimension(), spec.dimension()));
  const Eigen::MatrixXd l = llt.matrixL();
  t.det_g = l.diagonal().prod();
  t.det_g *= t.det_g;
  t.x = x;
  t.y = y;
  return t;
}

CartanData cartan_tensor(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y) {
  check_sample(spec, x, y);
  const int n = spec.dimension();
  const Jet f2 = spec.frozen(x).jet(y, 3);
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = 0.5 * partial_of(f2, n, {i, j});
  const auto llt = factor(g);
  const Eigen::MatrixXd ginv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  CartanData c;
  c.C = Tensor3(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) {
        const double v = 0.25 * partial_of(f2, n, {i, j, k});
        c.C(i, j, k) = c.C(i, k, j) = c.C(j, i, k) = c.C(j, k, i) = c.C(k, i, j) = c.C(k, j, i) = v;
      }
  // d_k ln sqrt(det g) = (1/2) g^ij d_k g_ij and d_k g_ij = 2 C_ijk
  c.I_cov = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) c.I_cov(k) += ginv(i, j) * c.C(i, j, k);
  c.I_contra = ginv * c.I_cov;
  return c;
}

SprayData spray(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y) {
  check_sample(spec, x, y);
  const int n = spec.dimension();
  const auto fj = fiber_jets(spec, x, y, 3, false);
  const auto llt = factor(fj.g0);
  SprayData s;
  s.G_cov = Eigen::VectorXd(n);
  for (int l = 0; l < n; ++l) s.G_cov(l) = fj.Gcov[static_cast<std::size_t>(l)].value();
  s.G_contra = llt.solve(s.G_cov);
  return s;
}

CurvatureTensors berwald_landsberg_tensors(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y) {
  check_sample(spec, x, y);
  const int n = spec.dimension();
  const auto fj = fiber_jets(spec, x, y, 5, false);
  const auto llt = factor(fj.g0);
  const Eigen::MatrixXd g0inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  const auto ginv = inverse_series(fj.g, g0inv, fj.yspace->max_degree());
  CurvatureTensors t;
  t.method = "jet";
  t.berwald = Tensor4(n);
  t.landsberg = Tensor3(n);
  for (int i = 0; i < n; ++i) {
    Jet Gi(0.0);
    for (int l = 0; l < n; ++l) Gi += ginv(i, l) * fj.Gcov[static_cast<std::size_t>(l)];
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        for (int r = 0; r < n; ++r) t.berwald(i, p, q, r) = partial_of(Gi, n, {p, q, r});
  }
  const Eigen::VectorXd gy = fj.g0 * y.coords;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += gy(i) * t.berwald(i, p, q, r);
        t.landsberg(p, q, r) = acc;
      }
  t.max_berwald = t.berwald.max_abs();
  t.max_landsberg = t.landsberg.max_abs();
  return t;
}

CurvatureTensors berwald_landsberg_fd(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y, double step) {
  check_sample(spec, x, y);
  const int n = spec.dimension();
  const double h0 = step * std::max(1.0, y.coords.norm());
  auto G = [&](const Eigen::VectorXd& yy) { return spray(spec, x, FiberVector(yy)).G_contra; };
  // product of three central differences
  auto third = [&](int p, int q, int r, double h) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    for (int sp : {-1, 1})
      for (int sq : {-1, 1})
        for (int sr : {-1, 1}) {
          Eigen::VectorXd yy = y.coords;
          yy(p) += sp * h;
          yy(q) += sq * h;
          yy(r) += sr * h;
          acc += (sp * sq * sr) * G(yy);
        }
    return Eigen::VectorXd(acc / (8.0 * h * h * h));
  };
  CurvatureTensors t;
  t.method = "fd-spray";
  t.berwald = Tensor4(n);
  t.landsberg = Tensor3(n);
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q)
      for (int r = q; r < n; ++r) {
        const Eigen::VectorXd d = (4.0 * third(p, q, r, 0.5 * h0) - third(p, q, r, h0)) / 3.0;
        for (int i = 0; i < n; ++i) {
          for (auto [a, b, c] : {std::array{p, q, r}, std::array{p, r, q}, std::array{q, p, r}, std::array{q, r, p},
                                 std::array{r, p, q}, std::array{r, q, p}}) {
            t.berwald(i, a, b, c) = d(i);
          }
        }
      }
  const Eigen::VectorXd gy = fundamental_tensor(spec, x, y).g * y.coords;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += gy(i) * t.berwald(i, p, q, r);
        t.landsberg(p, q, r) = acc;
      }
  t.max_berwald = t.berwald.max_abs();
  t.max_landsberg = t.landsberg.max_abs();
  return t;
}

VolumeDistortion bh_density(const MetricSpec& spec, const ChartPoint& x, int nodes) {
  const int n = spec.dimension();
  if (nodes == 0) nodes = default_nodes(n);
  check_nodes(n, nodes);
  const auto norm = spec.frozen(x);
  VolumeDistortion v;
  v.omega_n = unit_ball_volume(n);
  v.quadrature_nodes = nodes;
  v.sigma = sigma_at(norm, n, nodes);
  const double fine = sigma_at(norm, n, 2 * nodes);
  v.refinement_change = std::abs(fine - v.sigma) / std::abs(v.sigma);
  if (!(v.refinement_change < kRefinementTolerance)) {
    v.warning = "quadrature not converged: doubling the nodes changes sigma by " + std::to_string(v.refinement_change);
  }
  if (!(v.sigma > 0.0) || !std::isfinite(v.sigma)) throw EvaluationError("bh_density: non-finite density");
  return v;
}

VolumeDistortion tau(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y, int nodes) {
  auto v = bh_density(spec, x, nodes);
  const auto ft = fundamental_tensor(spec, x, y);
  v.tau = std::log(std::sqrt(ft.det_g) / v.sigma);
  return v;
}

Eigen::VectorXd log_sigma_gradient(const MetricSpec& spec, const ChartPoint& x, double step, int nodes) {
  const int n = spec.dimension();
  if (nodes == 0) nodes = default_nodes(n);
  check_nodes(n, nodes);
  Eigen::VectorXd grad(n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd xp = x.coords;
    Eigen::VectorXd xm = x.coords;
    xp(k) += step;
    xm(k) -= step;
    const double sp = sigma_at(spec.frozen(ChartPoint(xp)), n, nodes);
    const double sm = sigma_at(spec.frozen(ChartPoint(xm)), n, nodes);
    grad(k) = (std::log(sp) - std::log(sm)) / (2.0 * step);
  }
  return grad;
}

SCurvatureDirect s_curvature_at(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y,
                                const Eigen::VectorXd& log_sigma_grad) {
  check_sample(spec, x, y);
  const int n = spec.dimension();
  const auto fj = fiber_jets(spec, x, y, 3, true);
  const auto llt = factor(fj.g0);
  const Eigen::MatrixXd ginv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  SCurvatureDirect s;
  for (int k = 0; k < n; ++k) s.log_det_term += y.coords(k) * 0.5 * (ginv.cwiseProduct(fj.dg_dx[k])).sum();
  // I_k = (1/2) g^ij d_{y^k} g_ij
  Eigen::VectorXd I = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) I(k) += 0.5 * ginv(i, j) * partial_of(fj.g(i, j), n, {k});
  Eigen::VectorXd Gcov(n);
  for (int l = 0; l < n; ++l) Gcov(l) = fj.Gcov[static_cast<std::size_t>(l)].value();
  const Eigen::VectorXd G = ginv * Gcov;
  s.spray_term = 2.0 * G.dot(I);
  s.log_sigma_term = y.coords.dot(log_sigma_grad);
  s.S = s.log_det_term - s.log_sigma_term - s.spray_term;
  return s;
}

SCurvatureDirect s_curvature_direct(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y, double fd_step,
                                    int nodes) {
  check_sample(spec, x, y);
  auto s = s_curvature_at(spec, x, y, log_sigma_gradient(spec, x, fd_step, nodes));
  const auto vol = bh_density(spec, x, nodes);
  s.sigma = vol.sigma;
  s.warning = vol.warning;
  return s;
}

SCurvatureTerms s_curvature_formula(const MetricSpec& spec, const manifold::NormalChartReport& report, double a,
                                    double a_prime) {
  if (a == 0.0 || a_prime == 0.0) throw PreconditionError("s_curvature_formula: y must lie off both subbundles");
  if (std::abs(a * a + a_prime * a_prime - 1.0) > 1e-9) {
    throw PreconditionError("s_curvature_formula: need a^2 + a'^2 = 1");
  }
  const auto p = spec.generator().partials(a * a, a_prime * a_prime);
  const double d = closed_form::det_2x2(p);
  if (!(d > 0.0)) {
    throw DegenerateDenominatorError("L1 L2 - 2 L L12 = " + std::to_string(d) + " is not positive at this direction");
  }
  SCurvatureTerms t;
  t.A1 = report.A1;
  t.A2 = report.A2;
  t.Psi = closed_form::Psi(p, a, a_prime, report.n1, report.n2);
  t.Phi = p.L / d * t.Psi;
  t.S_formula = -t.Phi * (a * p.L1 * t.A1 + a_prime * p.L2 * t.A2);
  return t;
}

IdentityCheck s_vanishing_identities(const manifold::NormalChartReport& report, double tol) {
  const int n1 = report.n1;
  const int n = report.n1 + report.n2;
  IdentityCheck c;
  auto visit = [&](int i, int j, int k) {
    c.max_violation = std::max(c.max_violation, std::abs(report.db(i, j, k) + report.db(j, i, k)));
  };
  for (int i = 0; i < n1; ++i)
    for (int j = i; j < n1; ++j)
      for (int k = n1; k < n; ++k) visit(i, j, k);
  for (int k = 0; k < n1; ++k)
    for (int i = n1; i < n; ++i)
      for (int j = i; j < n; ++j) visit(i, j, k);
  c.holds = c.max_violation < tol;
  return c;
}

namespace closed_form {

double det_2x2(const LPartials& p) { return p.L1 * p.L2 - 2.0 * p.L * p.L12; }

Eigen::MatrixXd g(const LPartials& p, double a, double ap, int n1, int n2) {
  const int n = n1 + n2;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n1; ++i) m(i, i) = p.L1;
  for (int i = n1; i < n - 1; ++i) m(i, i) = p.L2;
  m(0, 0) = p.L1 + 2.0 * a * a * p.L11;
  m(n - 1, n - 1) = p.L2 + 2.0 * ap * ap * p.L22;
  m(0, n - 1) = m(n - 1, 0) = 2.0 * a * ap * p.L12;
  return m;
}

Eigen::MatrixXd g_inv(const LPartials& p, double a, double ap, int n1, int n2) {
  const int n = n1 + n2;
  const double d = det_2x2(p);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n1; ++i) m(i, i) = 1.0 / p.L1;
  for (int i = n1; i < n - 1; ++i) m(i, i) = 1.0 / p.L2;
  m(0, 0) = (p.L2 + 2.0 * ap * ap * p.L22) / d;
  m(n - 1, n - 1) = (p.L1 + 2.0 * a * a * p.L11) / d;
  m(0, n - 1) = m(n - 1, 0) = -2.0 * a * ap * p.L12 / d;
  return m;
}

Tensor3 cartan(const LPartials& p, double a, double ap, int n1, int n2) {
  const int n = n1 + n2;
  Tensor3 c(n);
  auto set = [&c](int i, int j, int k, double v) {
    c(i, j, k) = c(i, k, j) = c(j, i, k) = c(j, k, i) = c(k, i, j) = c(k, j, i) = v;
  };
  const int last = n - 1;
  set(0, 0, 0, 3.0 * a * p.L11 + 2.0 * a * a * a * p.L111);
  set(last, last, 0, a * p.L12 + 2.0 * a * ap * ap * p.L122);
  set(last, 0, 0, ap * p.L12 + 2.0 * a * a * ap * p.L112);
  set(last, last, last, 3.0 * ap * p.L22 + 2.0 * ap * ap * ap * p.L222);
  for (int i = 1; i < n1; ++i) {
    set(i, i, 0, a * p.L11);
    set(i, i, last, ap * p.L12);
  }
  for (int i = n1; i < last; ++i) {
    set(i, i, 0, a * p.L12);
    set(i, i, last, ap * p.L22);
  }
  return c;
}

Eigen::VectorXd mean_cartan(const LPartials& p, double a, double ap, int n1, int n2) {
  const int n = n1 + n2;
  const double d = det_2x2(p);
  Eigen::VectorXd I = Eigen::VectorXd::Zero(n);
  I(0) = (-p.L * p.L12 - 2.0 * a * a * p.L * p.L112) / (a * d) + (n1 - 1) * a * p.L11 / p.L1 +
         (n2 - 1) * a * p.L12 / p.L2;
  I(n - 1) = (-p.L * p.L12 - 2.0 * ap * ap * p.L * p.L122) / (ap * d) + (n1 - 1) * ap * p.L12 / p.L1 +
             (n2 - 1) * ap * p.L22 / p.L2;
  return I;
}

Eigen::VectorXd mean_cartan_contra(const LPartials& p, double a, double ap, int n1, int n2, bool printed_denominator) {
  const int n = n1 + n2;
  const Eigen::VectorXd I = mean_cartan(p, a, ap, n1, n2);
  const double d = det_2x2(p);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  out(0) = I(0) * p.L2 / d;
  out(n - 1) = I(n - 1) * p.L1 / (printed_denominator ? p.L1 * p.L2 - p.L * p.L12 : d);
  return out;
}

std::pair<double, double> spray_cov(const LPartials& p, double a, double ap, double A1, double A2) {
  const double g1 = a * ap * p.L12 * A1 + 0.5 * ap * ap * (p.L2 - p.L1 + 2.0 * p.L12) * A2;
  const double gn = 0.5 * a * a * (p.L2 - p.L1 - 2.0 * p.L12) * A1 - a * ap * p.L12 * A2;
  return {g1, gn};
}

double Psi(const LPartials& p, double a, double ap, int n1, int n2) {
  const double d = det_2x2(p);
  return (-p.L * p.L12 - 2.0 * a * a * p.L * p.L112) / (a * ap * d) + (n1 - 1) * a * p.L11 / (ap * p.L1) +
         (n2 - 1) * a * p.L12 / (ap * p.L2);
}

double Phi(const LPartials& p, double a, double ap, int n1, int n2) { return p.L / det_2x2(p) * Psi(p, a, ap, n1, n2); }

}  // namespace closed_form

const std::vector<std::string>& batch_quantities() {
  static const std::vector<std::string> q{"g", "det_g", "C", "I", "G", "berwald", "landsberg", "sigma", "tau", "S"};
  return q;
}

std::vector<BatchRow> batch_evaluate(const MetricSpec& spec, const std::vector<SamplePlanEntry>& plan,
                                     const std::vector<std::string>& quantities, int nodes) {
  for (const auto& q : quantities) {
    if (std::find(batch_quantities().begin(), batch_quantities().end(), q) == batch_quantities().end()) {
      throw ConfigError("unknown quantity '" + q + "'");
    }
  }
  auto wants = [&](const char* q) { return std::find(quantities.begin(), quantities.end(), q) != quantities.end(); };
  const int n = spec.dimension();
  std::vector<BatchRow> rows;
  auto idx = [](std::initializer_list<int> ids) {
    std::string s = "[";
    bool first = true;
    for (int i : ids) {
      if (!first) s += ",";
      s += std::to_string(i);
      first = false;
    }
    return s + "]";
  };
  for (const auto& entry : plan) {
    std::optional<VolumeDistortion> vol;
    if (wants("sigma") || wants("tau")) vol = bh_density(spec, entry.x, nodes);
    if (wants("sigma")) {
      rows.push_back({entry.x, FiberVector(Eigen::VectorXd::Zero(n)), "sigma", vol->sigma, "quadrature",
                      vol->refinement_change * vol->sigma});
    }
    for (const auto& y : sphere_directions(n, entry.directions)) {
      auto add = [&](std::string q, double v, const char* method, double err = 0.0) {
        rows.push_back({entry.x, y, std::move(q), v, method, err});
      };
      if (wants("g") || wants("det_g") || wants("tau")) {
        const auto ft = fundamental_tensor(spec, entry.x, y);
        if (wants("g"))
          for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) add("g" + idx({i, j}), ft.g(i, j), "jet");
        if (wants("det_g")) add("det_g", ft.det_g, "jet");
        if (wants("tau")) add("tau", std::log(std::sqrt(ft.det_g) / vol->sigma), "jet+quadrature");
      }
      if (wants("C") || wants("I")) {
        const auto c = cartan_tensor(spec, entry.x, y);
        if (wants("C"))
          for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
              for (int k = j; k < n; ++k) add("C" + idx({i, j, k}), c.C(i, j, k), "jet");
        if (wants("I"))
          for (int k = 0; k < n; ++k) add("I" + idx({k}), c.I_cov(k), "jet");
      }
      if (wants("G")) {
        const auto s = spray(spec, entry.x, y);
        for (int i = 0; i < n; ++i) add("G" + idx({i}), s.G_contra(i), "jet");
      }
      if (wants("berwald") || wants("landsberg")) {
        const auto t = berwald_landsberg_tensors(spec, entry.x, y);
        if (wants("berwald")) add("max_berwald", t.max_berwald, "jet");
        if (wants("landsberg")) add("max_landsberg", t.max_landsberg, "jet");
      }
      if (wants("S")) {
        const auto s = s_curvature_direct(spec, entry.x, y, kDefaultSigmaStep, nodes);
        add("S", s.S, "jet+fd-sigma", kDefaultSigmaStep * kDefaultSigmaStep);
      }
    }
  }
  return rows;
}

}  // namespace finsler::curvature
