#include "finsler/landsberg/landsberg.hpp"

#include <cmath>
#include <numbers>

#include "finsler/curvature/curvature.hpp"
#include "finsler/manifold/normal_chart.hpp"
#include "finsler/sampling.hpp"

namespace finsler::landsberg {

namespace {

using derivjet::JetSpace;
using derivjet::JetSpacePtr;

Jet shifted(const Jet& j, std::vector<int> shift, const JetSpacePtr& target) {
  if (!j.has_space()) {
    for (int s : shift)
      if (s != 0) return Jet(0.0);
    return j;
  }
  std::vector<int> map(shift.size());
  for (std::size_t i = 0; i < map.size(); ++i) map[i] = static_cast<int>(i);
  return derivjet::derive_into(j, shift, target, map);
}

std::vector<int> unit(int n, std::initializer_list<int> vars) {
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  for (int v : vars) ++e[static_cast<std::size_t>(v)];
  return e;
}

// G^i(f) as jets in y of degree `cap`, plus g(y0)
std::vector<Jet> operator_jets(const MinkowskiNorm& norm, const FiberField& f, const FiberVector& y, int cap,
                               Eigen::MatrixXd* g0) {
  const int n = norm.dimension();
  if (f.dimension() != n || y.dimension() != n) throw DomainError("landsberg: dimension mismatch");
  if (y.is_zero()) throw DomainError("landsberg: zero fiber");
  const auto big = JetSpace::uniform(n, cap + 2);
  const auto small = JetSpace::uniform(n, cap);
  std::vector<Jet> yb;
  std::vector<Jet> ys;
  for (int i = 0; i < n; ++i) {
    yb.push_back(Jet::variable(big, i, y.coords(i)));
    ys.push_back(Jet::variable(small, i, y.coords(i)));
  }
  const Jet f2 = norm.squared<Jet>(std::span<const Jet>(yb));
  std::vector<Jet> fv;
  try {
    fv = f(std::span<const Jet>(yb));
  } catch (const EvaluationError& e) {
    throw EvaluationError(std::string("landsberg: ") + e.what());
  }
  for (int k = 0; k < n; ++k) {
    if (!std::isfinite(fv[static_cast<std::size_t>(k)].value())) {
      throw EvaluationError("landsberg: component f_" + std::to_string(k + 1) + " of '" + f.name() + "' is not finite");
    }
  }
  SmallMatrix<Jet> g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) g(i, j) = g(j, i) = shifted(f2, unit(n, {i, j}), small) * 0.5;
  if (g0) *g0 = primal_matrix(g);
  const auto ginv = curvature::jet_inverse(g);
  std::vector<Jet> h;
  for (int l = 0; l < n; ++l) {
    Jet acc = -shifted(fv[static_cast<std::size_t>(l)], unit(n, {}), small);
    for (int k = 0; k < n; ++k) acc += ys[static_cast<std::size_t>(k)] * shifted(fv[static_cast<std::size_t>(k)], unit(n, {l}), small);
    h.push_back(acc);
  }
  std::vector<Jet> G;
  for (int i = 0; i < n; ++i) {
    Jet acc(0.0);
    for (int l = 0; l < n; ++l) acc += ginv(i, l) * h[static_cast<std::size_t>(l)];
    G.push_back(acc * 0.25);
  }
  return G;
}

Eigen::MatrixXd givens(int n, int i, int j, double angle) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n, n);
  r(i, i) = r(j, j) = std::cos(angle);
  r(i, j) = -std::sin(angle);
  r(j, i) = std::sin(angle);
  return r;
}

}  // namespace

Eigen::VectorXd FiberField::at(const FiberVector& y) const {
  const auto v = (*this)(y.span());
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double FiberField::homogeneity_residual(const std::vector<FiberVector>& samples) const {
  double worst = 0.0;
  for (const auto& y : samples) {
    const Eigen::VectorXd f0 = at(y);
    for (double lambda : {0.5, 2.0}) {
      const Eigen::VectorXd fl = at(FiberVector(Eigen::VectorXd(lambda * y.coords)));
      const double scale = std::max(1.0, f0.cwiseAbs().maxCoeff());
      worst = std::max(worst, (fl - lambda * lambda * f0).cwiseAbs().maxCoeff() / (lambda * lambda * scale));
    }
  }
  return worst;
}

FiberField FiberField::zero(int n) {
  return FiberField(n, GenericFunction<VectorFn>([n](auto y) {
                      using T = typename decltype(y)::value_type;
                      return std::vector<T>(static_cast<std::size_t>(n), T(0.0));
                    }),
                    "zero");
}

FiberField combine(double a, const FiberField& f, double b, const FiberField& h) {
  if (f.dimension() != h.dimension()) throw PreconditionError("combine: dimension mismatch");
  return FiberField(f.dimension(), GenericFunction<VectorFn>([a, b, f, h](auto y) {
                      using T = typename decltype(y)::value_type;
                      auto u = f.template operator()<T>(y);
                      const auto v = h.template operator()<T>(y);
                      for (std::size_t i = 0; i < u.size(); ++i) u[i] = u[i] * a + v[i] * b;
                      return u;
                    }),
                    "combine(" + f.name() + ", " + h.name() + ")");
}

LinearMap LinearMap::from_matrix(const Eigen::MatrixXd& xi) {
  if (xi.rows() != xi.cols()) throw PreconditionError("linear map must be square");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(xi);
  if (!lu.isInvertible()) throw PreconditionError("linear map is singular");
  return {xi, lu.inverse()};
}

LinearMap LinearMap::identity(int n) { return {Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Identity(n, n)}; }

LinearMap LinearMap::block(const Eigen::MatrixXd& r1, const Eigen::MatrixXd& r2) {
  const auto n1 = r1.rows();
  const auto n2 = r2.rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
  m.topLeftCorner(n1, n1) = r1;
  m.bottomRightCorner(n2, n2) = r2;
  return from_matrix(m);
}

LinearMap LinearMap::reflection(int n, const std::vector<int>& indices) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (int i : indices) m(i, i) = -1.0;
  return {m, m};
}

LinearMap LinearMap::compose(const LinearMap& other) const { return {xi * other.xi, other.eta * eta}; }

std::vector<LinearMap> block_rotations(int n1, int n2, int count) {
  std::vector<LinearMap> out;
  const int angles = std::max(1, (n1 * (n1 - 1) + n2 * (n2 - 1)) / 2);
  for (int c = 1; static_cast<int>(out.size()) < count; ++c) {
    const auto h = halton(c, angles);
    Eigen::MatrixXd r1 = Eigen::MatrixXd::Identity(n1, n1);
    Eigen::MatrixXd r2 = Eigen::MatrixXd::Identity(n2, n2);
    std::size_t k = 0;
    for (int i = 0; i < n1; ++i)
      for (int j = i + 1; j < n1; ++j) r1 = r1 * givens(n1, i, j, 2.0 * std::numbers::pi * h[k++]);
    for (int i = 0; i < n2; ++i)
      for (int j = i + 1; j < n2; ++j) r2 = r2 * givens(n2, i, j, 2.0 * std::numbers::pi * h[k++]);
    if (c % 2 == 0) r1.col(0) *= -1.0;
    if (c % 3 == 0) r2.col(n2 - 1) *= -1.0;
    out.push_back(LinearMap::block(r1, r2));
  }
  return out;
}

FiberField isometry_action(const LinearMap& map, const FiberField& f) {
  if (map.dimension() != f.dimension()) throw PreconditionError("isometry_action: dimension mismatch");
  const Eigen::MatrixXd xi = map.xi;
  const int n = f.dimension();
  return FiberField(n, GenericFunction<VectorFn>([xi, f, n](auto y) {
                      using T = typename decltype(y)::value_type;
                      std::vector<T> yp(static_cast<std::size_t>(n), T(0.0));
                      for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j)
                          if (xi(i, j) != 0.0) yp[static_cast<std::size_t>(i)] += xi(i, j) * y[static_cast<std::size_t>(j)];
                      const auto fy = f.template operator()<T>(std::span<const T>(yp));
                      std::vector<T> out(static_cast<std::size_t>(n), T(0.0));
                      for (int j = 0; j < n; ++j)
                        for (int i = 0; i < n; ++i)
                          if (xi(i, j) != 0.0) out[static_cast<std::size_t>(j)] += xi(i, j) * fy[static_cast<std::size_t>(i)];
                      return out;
                    }),
                    "xi." + f.name());
}

FiberField parity_part(const LinearMap& rho, const FiberField& f, int sign) {
  if (sign != 1 && sign != -1) throw PreconditionError("parity_part: sign must be +1 or -1");
  if (((rho.xi * rho.xi) - Eigen::MatrixXd::Identity(rho.dimension(), rho.dimension())).cwiseAbs().maxCoeff() > 1e-12) {
    throw PreconditionError("parity_part: map is not an involution");
  }
  return combine(0.5, f, 0.5 * sign, isometry_action(rho, f));
}

Eigen::VectorXd landsberg_operator(const MinkowskiNorm& norm, const FiberField& f, const FiberVector& y) {
  const auto G = operator_jets(norm, f, y, 1, nullptr);
  Eigen::VectorXd out(static_cast<Eigen::Index>(G.size()));
  for (std::size_t i = 0; i < G.size(); ++i) out(static_cast<Eigen::Index>(i)) = G[i].value();
  return out;
}

ResidualTable landsberg_residual(const MinkowskiNorm& norm, const FiberField& f, const FiberVector& y) {
  const int n = norm.dimension();
  Eigen::MatrixXd g0;
  const auto G = operator_jets(norm, f, y, 3, &g0);
  const Eigen::VectorXd gy = g0 * y.coords;
  ResidualTable r;
  r.values = Tensor3(n);
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q)
      for (int s = q; s < n; ++s) {
        const auto e = unit(n, {p, q, s});
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += gy(i) * G[static_cast<std::size_t>(i)].partial(e);
        for (auto [a, b, c] : {std::array{p, q, s}, std::array{p, s, q}, std::array{q, p, s}, std::array{q, s, p},
                               std::array{s, p, q}, std::array{s, q, p}}) {
          r.values(a, b, c) = acc;
        }
      }
  r.max_abs = r.values.max_abs();
  return r;
}

FiberField canonical_f(const metrics::MetricSpec& spec, const ChartPoint& p) {
  if (!spec.in_domain(p.span())) throw DomainError("canonical_f: point outside the chart domain");
  const auto& model = spec.model();
  const auto& gen = spec.generator();
  const int n = spec.dimension();
  const Eigen::MatrixXd a = primal_matrix(model.a<double>(p.span()));
  const Eigen::MatrixXd b = primal_matrix(model.b<double>(p.span()));
  const Tensor3 db = manifold::matrix_derivatives(model.b_field(), p);
  const Tensor3 dalpha = manifold::matrix_derivatives(model.alpha_field(), p);
  return FiberField(n, GenericFunction<VectorFn>([a, b, db, dalpha, gen, n](auto y) {
                      using T = typename decltype(y)::value_type;
                      T s(0.0);
                      T t(0.0);
                      for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) {
                          const T yy = y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
                          s += a(i, j) * yy;
                          t += b(i, j) * yy;
                        }
                      T l1;
                      T l2;
                      if constexpr (std::is_same_v<T, Jet>) {
                        l1 = gen.partial(1, 0, s, t);
                        l2 = gen.partial(0, 1, s, t);
                      } else {
                        const auto pr = gen.partials(math::primal(s), math::primal(t));
                        l1 = T(pr.L1);
                        l2 = T(pr.L2);
                      }
                      std::vector<T> out;
                      for (int l = 0; l < n; ++l) {
                        T qa(0.0);
                        T qb(0.0);
                        for (int i = 0; i < n; ++i)
                          for (int j = 0; j < n; ++j) {
                            const T yy = y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
                            qa += (dalpha(l, i, j) - db(l, i, j)) * yy;
                            qb += db(l, i, j) * yy;
                          }
                        out.push_back(l1 * qa + l2 * qb);
                      }
                      return out;
                    }),
                    "canonical");
}

double isometry_defect(const MinkowskiNorm& norm, const LinearMap& map, int samples, FiberVector* worst) {
  double defect = 0.0;
  for (const auto& y : sphere_directions(norm.dimension(), samples)) {
    const double f = norm(y);
    const double d = std::abs(norm(FiberVector(Eigen::VectorXd(map.xi * y.coords))) - f) / f;
    if (d > defect || !std::isfinite(d)) {
      defect = d;
      if (worst) *worst = y;
    }
  }
  return defect;
}

InvarianceReport invariance_check(const MinkowskiNorm& norm, const LinearMap& map, const FiberField& f,
                                  const std::vector<FiberVector>& samples, double tol, double kernel_tol) {
  const int n = norm.dimension();
  if (map.dimension() != n || f.dimension() != n) throw PreconditionError("invariance_check: dimension mismatch");
  InvarianceReport r;
  FiberVector worst;
  r.isometry_residual = isometry_defect(norm, map, kIsometrySamples, &worst);
  for (const auto& y : samples) {
    const double fy = norm(y);
    const double d = std::abs(norm(FiberVector(Eigen::VectorXd(map.xi * y.coords))) - fy) / fy;
    if (d > r.isometry_residual) {
      r.isometry_residual = d;
      worst = y;
    }
  }
  if (!(r.isometry_residual < kIsometryTolerance)) {
    std::ostringstream os;
    os << "invariance_check: map is not an isometry of the norm (defect " << r.isometry_residual << " at y = ("
       << worst.coords.transpose() << "))";
    throw PreconditionError(os.str());
  }
  const auto xf = isometry_action(map, f);
  r.samples = static_cast<int>(samples.size());
  r.condition_factor = std::pow(map.xi.operatorNorm(), 3);
  for (const auto& y : samples) {
    const FiberVector yp(Eigen::VectorXd(map.xi * y.coords));
    const Eigen::MatrixXd g = metrics::fiber_hessian(norm, y);
    const Eigen::MatrixXd gp = metrics::fiber_hessian(norm, yp);
    r.hessian_residual = std::max(r.hessian_residual, (gp - map.eta.transpose() * g * map.eta).cwiseAbs().maxCoeff());
    const Eigen::VectorXd lhs = landsberg_operator(norm, xf, y);
    const Eigen::VectorXd rhs = map.eta * landsberg_operator(norm, f, yp);
    r.kernel_residual =
        std::max(r.kernel_residual, (lhs - rhs).cwiseAbs().maxCoeff() / std::max(1.0, rhs.cwiseAbs().maxCoeff()));
    r.residual_f = std::max(r.residual_f, landsberg_residual(norm, f, y).max_abs);
    r.residual_xi_f = std::max(r.residual_xi_f, landsberg_residual(norm, xf, y).max_abs);
  }
  r.f_is_solution = r.residual_f < tol;
  r.xi_f_is_solution = r.residual_xi_f < r.condition_factor * tol;
  r.passed = r.kernel_residual < kernel_tol && (!r.f_is_solution || r.xi_f_is_solution);
  return r;
}

}  // namespace finsler::landsberg
