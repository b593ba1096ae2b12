#include "finsler/manifold/normal_chart.hpp"

#include <cmath>

#include "finsler/errors.hpp"

namespace finsler::manifold {

namespace {

std::vector<Jet> linear_jets(const ChartPoint& x) {
  const int n = x.dimension();
  auto space = derivjet::JetSpace::uniform(n, 1);
  std::vector<Jet> out;
  for (int i = 0; i < n; ++i) out.push_back(Jet::variable(space, i, x.coords(i)));
  return out;
}

double d(const Jet& j, int k, int n) {
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  e[static_cast<std::size_t>(k)] = 1;
  return j.partial(e);
}

Tensor3 derivatives_of(const SmallMatrix<Jet>& m, int n) {
  Tensor3 t(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) t(k, i, j) = d(m(i, j), k, n);
  return t;
}

double alpha_dot(const Eigen::MatrixXd& a, const Eigen::VectorXd& u, const Eigen::VectorXd& v) { return u.dot(a * v); }

// alpha-orthonormal basis of the image of `proj`, built from its columns in order
std::vector<Eigen::VectorXd> block_frame(const Eigen::MatrixXd& a, const Eigen::MatrixXd& proj, int dim) {
  std::vector<Eigen::VectorXd> out;
  const double scale = std::max(1.0, proj.cwiseAbs().maxCoeff());
  for (int i = 0; i < proj.cols() && static_cast<int>(out.size()) < dim; ++i) {
    Eigen::VectorXd v = proj.col(i);
    for (const auto& u : out) v -= alpha_dot(a, u, v) * u;
    const double norm = std::sqrt(std::max(0.0, alpha_dot(a, v, v)));
    if (norm > 1e-8 * scale) out.push_back(v / norm);
  }
  if (static_cast<int>(out.size()) != dim) throw ModelError("normal_chart: could not build a frame of the subbundle");
  return out;
}

// Householder reflection of R^m taking w to |w| e_target
Eigen::MatrixXd householder_to(const Eigen::VectorXd& w, int target) {
  const int m = static_cast<int>(w.size());
  Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
  e(target) = w.norm();
  const Eigen::VectorXd v = w - e;
  if (v.norm() < 1e-15 * std::max(1.0, w.norm())) return Eigen::MatrixXd::Identity(m, m);
  return Eigen::MatrixXd::Identity(m, m) - 2.0 * v * v.transpose() / v.squaredNorm();
}

}  // namespace

Tensor3 matrix_derivatives(const MatrixField& field, const ChartPoint& x) {
  const auto xj = linear_jets(x);
  return derivatives_of(field.get<Jet>()(std::span<const Jet>(xj)), x.dimension());
}

Tensor3 christoffel(const ManifoldModel& model, const ChartPoint& x) {
  const int n = model.dimension();
  const Tensor3 da = matrix_derivatives(model.alpha_field(), x);
  const Eigen::MatrixXd ainv = primal_matrix(model.alpha<double>(x.span())).inverse();
  Tensor3 g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l) acc += ainv(i, l) * (da(j, l, k) + da(k, l, j) - da(l, j, k));
        g(i, j, k) = 0.5 * acc;
      }
  return g;
}

NormalChartReport normal_chart(const ManifoldModel& model, const ChartPoint& p, const std::optional<FiberVector>& align) {
  const int n = model.dimension();
  const int n1 = model.n1();
  const int n2 = model.n2();
  if (p.dimension() != n) throw DomainError("normal_chart: point dimension does not match model");
  if (!model.in_domain(p.span())) throw DomainError("normal_chart: point outside the model's domain");

  const Eigen::MatrixXd a = primal_matrix(model.alpha<double>(p.span()));
  const Eigen::MatrixXd b = primal_matrix(model.b<double>(p.span()));
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw ModelError("normal_chart: alpha is not positive definite at p");
  const Eigen::MatrixXd p2 = llt.solve(b);
  const Eigen::MatrixXd p1 = Eigen::MatrixXd::Identity(n, n) - p2;

  // V2 has rank n2 iff alpha^-1 b has n2 eigenvalues at 1 and n1 at 0
  const Eigen::VectorXcd ev = p2.eigenvalues();
  int ones = 0;
  int zeros = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i) - 1.0) < 1e-6) ++ones;
    if (std::abs(ev(i)) < 1e-6) ++zeros;
  }
  if (ones != n2 || zeros != n1) {
    throw ModelError("normal_chart: b is not an alpha-orthogonal projector of rank " + std::to_string(n2) + " at p");
  }

  const auto f1 = block_frame(a, p1, n1);
  const auto f2 = block_frame(a, p2, n2);
  Eigen::MatrixXd E(n, n);
  for (int i = 0; i < n1; ++i) E.col(i) = f1[static_cast<std::size_t>(i)];
  for (int i = 0; i < n2; ++i) E.col(n1 + i) = f2[static_cast<std::size_t>(i)];

  NormalChartReport r;
  if (align) {
    if (align->dimension() != n) throw AlignmentError("normal_chart: align vector has the wrong dimension");
    const Eigen::VectorXd w = E.fullPivLu().solve(align->coords);
    const Eigen::VectorXd w1 = w.head(n1);
    const Eigen::VectorXd w2 = w.tail(n2);
    const double scale = std::max(w.norm(), 1e-300);
    if (w1.norm() < 1e-10 * scale || w2.norm() < 1e-10 * scale) {
      throw AlignmentError("normal_chart: align vector lies inside a subbundle");
    }
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
    R.topLeftCorner(n1, n1) = householder_to(w1, 0);
    R.bottomRightCorner(n2, n2) = householder_to(w2, n2 - 1);
    E = E * R.transpose();
    r.aligned = FiberVector(Eigen::VectorXd(R * w));
  }

  const Tensor3 gamma = christoffel(model, p);
  Tensor3 Q(n);
  for (int i = 0; i < n; ++i)
    for (int bb = 0; bb < n; ++bb)
      for (int c = 0; c < n; ++c) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) acc += gamma(i, j, k) * E(j, bb) * E(k, c);
        Q(i, bb, c) = -acc;
      }

  r.p = p;
  r.n1 = n1;
  r.n2 = n2;
  r.chart_map = ChartMap{p.coords, E, Q};
  r.chart_model = model.pullback(r.chart_map);

  const ChartPoint zero = ChartPoint::origin(n);
  const auto zj = linear_jets(zero);
  const auto alpha_j = r.chart_model.alpha<Jet>(std::span<const Jet>(zj));
  const auto b_j = r.chart_model.b<Jet>(std::span<const Jet>(zj));
  r.db = derivatives_of(b_j, n);
  r.da = derivatives_of(alpha_j - b_j, n);
  r.A1 = r.db(0, 0, n - 1);
  r.A2 = r.db(n - 1, 0, n - 1);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r.alpha_deviation = std::max(r.alpha_deviation, std::abs(alpha_j(i, j).value() - (i == j)));
  r.christoffel_residual = christoffel(r.chart_model, zero).max_abs();

  // frame tilt: V1 = span{d_i + f_i^j d_j}, read from the columns of I - alpha^-1 b
  const auto proj1 = SmallMatrix<Jet>::identity(n) - inverse(alpha_j) * b_j;
  SmallMatrix<Jet> top(n1, n1);
  SmallMatrix<Jet> bottom(n2, n1);
  for (int i = 0; i < n1; ++i) {
    for (int k = 0; k < n1; ++k) top(k, i) = proj1(k, i);
    for (int k = 0; k < n2; ++k) bottom(k, i) = proj1(n1 + k, i);
  }
  const auto f = bottom * inverse(top);
  r.f_first_order = Tensor3(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) r.f_first_order(k, i, n1 + j) = d(f(j, i), k, n);
  return r;
}

Lemma31Report lemma31_check(const ManifoldModel& model, const NormalChartReport& report, double tol) {
  const int n = model.dimension();
  const int n1 = report.n1;
  Lemma31Report out;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        out.alpha_violation = std::max(out.alpha_violation, std::abs(report.da(k, i, j) + report.db(k, i, j)));
        const bool same_block = (i < n1) == (j < n1);
        if (same_block) {
          out.block_violation = std::max(out.block_violation, std::abs(report.db(k, i, j)));
        } else if (i < n1) {
          out.cross_violation =
              std::max(out.cross_violation, std::abs(report.db(k, i, j) + report.f_first_order(k, i, j)));
        }
      }
  out.max_violation = std::max({out.alpha_violation, out.block_violation, out.cross_violation});
  out.passed = out.max_violation < tol;
  return out;
}

bool berwald_criterion(const NormalChartReport& report, double tol) {
  const int n = report.n1 + report.n2;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < report.n1; ++i)
      for (int j = report.n1; j < n; ++j)
        if (std::abs(report.db(k, i, j)) >= tol || std::abs(report.db(k, j, i)) >= tol) return false;
  return true;
}

}  // namespace finsler::manifold
