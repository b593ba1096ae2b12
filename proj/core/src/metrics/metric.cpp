#include "finsler/metrics/metric.hpp"

#include <cmath>
#include <limits>

#include "finsler/sampling.hpp"

namespace finsler::metrics {

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::riemannian: return "riemannian";
    case MetricKind::randers: return "randers";
    case MetricKind::alpha_beta: return "alpha-beta";
    case MetricKind::alpha1_alpha2: return "alpha1-alpha2";
    case MetricKind::raw: return "raw";
  }
  return "unknown";
}

double MinkowskiNorm::operator()(const FiberVector& y) const { return std::sqrt(squared(y)); }

Jet MinkowskiNorm::jet(const FiberVector& y, int cap) const {
  auto space = derivjet::JetSpace::uniform(n_, cap);
  std::vector<Jet> yj;
  yj.reserve(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) yj.push_back(Jet::variable(space, i, y.coords(i)));
  return squared<Jet>(std::span<const Jet>(yj));
}

derivjet::ScalarField MinkowskiNorm::as_field() const {
  return derivjet::ScalarField(n_, [f2 = f2_](auto, auto y) {
    using T = typename decltype(y)::value_type;
    return f2.template get<T>()(y);
  });
}

MetricSpec MetricSpec::riemannian(ManifoldModel model) {
  MetricSpec s;
  s.kind_ = MetricKind::riemannian;
  s.name_ = "riemannian";
  s.n_ = model.dimension();
  s.model_ = std::move(model);
  return s;
}

MetricSpec MetricSpec::randers(ManifoldModel model, VectorField beta, std::string beta_name) {
  MetricSpec s;
  s.kind_ = MetricKind::randers;
  s.name_ = "randers:" + beta_name;
  s.n_ = model.dimension();
  s.model_ = std::move(model);
  s.beta_ = std::move(beta);
  return s;
}

MetricSpec MetricSpec::alpha_beta(ManifoldModel model, VectorField beta, GenericFunction<UnivariateFn> phi,
                                  std::string name) {
  MetricSpec s;
  s.kind_ = MetricKind::alpha_beta;
  s.name_ = std::move(name);
  s.n_ = model.dimension();
  s.model_ = std::move(model);
  s.beta_ = std::move(beta);
  s.phi_ = std::move(phi);
  return s;
}

MetricSpec MetricSpec::alpha1_alpha2(ManifoldModel model, Generator generator) {
  MetricSpec s;
  s.kind_ = MetricKind::alpha1_alpha2;
  s.name_ = generator.name();
  s.n_ = model.dimension();
  s.model_ = std::move(model);
  s.generator_ = std::move(generator);
  return s;
}

MetricSpec MetricSpec::raw(std::string name, int dimension, GenericFunction<XYScalarFn> squared_norm,
                           manifold::Domain domain) {
  MetricSpec s;
  s.kind_ = MetricKind::raw;
  s.name_ = std::move(name);
  s.n_ = dimension;
  // the model only carries the domain for raw norms
  auto flat = ManifoldModel::flat_product(1, dimension - 1);
  s.model_ = ManifoldModel(s.name_, 1, dimension - 1, flat.alpha_field(), flat.b_field(), std::move(domain),
                           ChartPoint::origin(dimension));
  s.raw_ = std::move(squared_norm);
  return s;
}

const Generator& MetricSpec::generator() const {
  if (kind_ != MetricKind::alpha1_alpha2) throw PreconditionError("metric '" + name_ + "' has no generator L");
  return generator_;
}

std::pair<double, double> MetricSpec::st(const ChartPoint& x, const FiberVector& y) const {
  if (kind_ != MetricKind::alpha1_alpha2) throw PreconditionError("metric '" + name_ + "' is not an (alpha1, alpha2)-metric");
  const auto g = geometry<double>(x.span());
  const double t = quadratic_form<double, double>(g.b, y.span());
  return {quadratic_form<double, double>(g.alpha, y.span()) - t, t};
}

derivjet::ScalarField MetricSpec::squared_norm_field() const {
  return derivjet::ScalarField(
      n_,
      [spec = *this](auto x, auto y) {
        using T = typename decltype(x)::value_type;
        return spec.squared_norm<T>(x, y);
      },
      model_.domain());
}

MinkowskiNorm MetricSpec::frozen(const ChartPoint& x) const {
  if (!in_domain(x.span())) throw DomainError("metric '" + name_ + "': base point outside the chart domain");
  const std::string label = name_ + "@x";
  if (kind_ == MetricKind::raw) {
    std::vector<double> xs(x.span().begin(), x.span().end());
    return MinkowskiNorm(n_,
                         GenericFunction<YScalarFn>([raw = raw_, xs](auto y) {
                           using T = typename decltype(y)::value_type;
                           std::vector<T> xt(xs.begin(), xs.end());
                           return raw.template get<T>()(std::span<const T>(xt), y);
                         }),
                         label);
  }
  const auto g = geometry<double>(x.span());
  return MinkowskiNorm(n_,
                       GenericFunction<YScalarFn>([spec = *this, g](auto y) {
                         using T = typename decltype(y)::value_type;
                         return spec.squared_norm_at<T, double>(g, y);
                       }),
                       label);
}

MetricSpec MetricSpec::in_chart(const manifold::ChartMap& map) const {
  MetricSpec s = *this;
  s.model_ = model_.pullback(map);
  if (kind_ == MetricKind::randers || kind_ == MetricKind::alpha_beta) {
    s.beta_ = VectorField([map, beta = beta_](auto z) {
      using T = typename decltype(z)::value_type;
      const auto x = map.apply<T>(z);
      const auto b = beta.template get<T>()(std::span<const T>(x));
      const auto j = map.jacobian<T>(z);
      return finsler::apply<T, T>(transpose(j), std::span<const T>(b));
    });
  }
  if (kind_ == MetricKind::raw) {
    s.raw_ = GenericFunction<XYScalarFn>([map, raw = raw_](auto z, auto w) {
      using T = typename decltype(z)::value_type;
      const auto x = map.apply<T>(z);
      const auto y = finsler::apply<T, T>(map.jacobian<T>(z), w);
      return raw.template get<T>()(std::span<const T>(x), std::span<const T>(y));
    });
  }
  return s;
}

MetricSpec MetricSpec::with_model(ManifoldModel model) const {
  MetricSpec s = *this;
  s.n_ = model.dimension();
  s.model_ = std::move(model);
  return s;
}

double norm_value(const MetricSpec& spec, const ChartPoint& x, const FiberVector& y) {
  if (x.dimension() != spec.dimension() || y.dimension() != spec.dimension()) {
    throw DomainError("norm_value: dimension mismatch");
  }
  if (y.is_zero()) throw DomainError("norm_value: zero fiber");
  if (!spec.in_domain(x.span())) throw DomainError("norm_value: base point outside the chart domain");
  const double f2 = spec.squared_norm<double>(x.span(), y.span());
  if (!(f2 > 0.0) || !std::isfinite(f2)) {
    throw InvalidGeneratorError("metric '" + spec.name() + "': F^2 = " + std::to_string(f2) + " is not positive");
  }
  return std::sqrt(f2);
}

Eigen::MatrixXd fiber_hessian(const MinkowskiNorm& norm, const FiberVector& y) {
  const int n = norm.dimension();
  const Jet f = norm.jet(y, 2);
  Eigen::MatrixXd g(n, n);
  std::vector<int> e(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      std::fill(e.begin(), e.end(), 0);
      ++e[static_cast<std::size_t>(i)];
      ++e[static_cast<std::size_t>(j)];
      g(i, j) = g(j, i) = 0.5 * f.partial(e);
    }
  return g;
}

ValidationReport validate_norm(const MetricSpec& spec, const ChartPoint& x, int num_directions, double tol) {
  if (num_directions < 8) throw PreconditionError("validate_norm: need at least 8 directions");
  if (!(tol > 0.0)) throw PreconditionError("validate_norm: tolerance must be positive");
  const int n = spec.dimension();
  const auto norm = spec.frozen(x);
  ValidationReport r;
  r.num_directions = num_directions;
  r.tol = tol;
  r.sequence = sphere_sequence_name(n);
  r.min_hessian_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& u : sphere_directions(n, num_directions)) {
    const double f2 = norm.squared(u);
    if (!(f2 > 0.0) || !std::isfinite(f2)) {
      r.positivity_ok = false;
      r.worst_direction = u;
      continue;
    }
    const double f = std::sqrt(f2);
    for (double lambda : {0.5, 2.0, 7.0}) {
      const double fl = norm(FiberVector(Eigen::VectorXd(lambda * u.coords)));
      r.homogeneity_residual_max = std::max(r.homogeneity_residual_max, std::abs(fl - lambda * f) / (lambda * f));
    }
    const Eigen::MatrixXd g = fiber_hessian(norm, u);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < r.min_hessian_eigenvalue || !std::isfinite(lo)) {
      r.min_hessian_eigenvalue = lo;
      if (r.positivity_ok) r.worst_direction = u;
    }
    if (spec.kind() == MetricKind::alpha1_alpha2) {
      const auto [s, t] = spec.st(x, u);
      const auto p = spec.generator().partials(s, t);
      r.euler_residual_max = std::max(r.euler_residual_max, std::abs(s * p.L1 + t * p.L2 - p.L) / std::abs(p.L));
    }
  }
  r.homogeneity_ok = r.homogeneity_residual_max < kHomogeneityTolerance;
  if (spec.kind() == MetricKind::alpha1_alpha2) r.homogeneity_ok = r.homogeneity_ok && r.euler_residual_max < 1e-9;
  r.convexity_ok = r.positivity_ok && std::isfinite(r.min_hessian_eigenvalue) && r.min_hessian_eigenvalue > tol;
  return r;
}

MetricSpec raw_test_metric(const std::string& name) {
  if (name == "quartic-test") {
    return MetricSpec::raw("quartic-test", 2, GenericFunction<XYScalarFn>([](auto, auto y) {
                             return math::sqrt(math::ipow(y[0], 4) + math::ipow(y[1], 4));
                           }));
  }
  throw ConfigError("unknown test metric '" + name + "'");
}

}  // namespace finsler::metrics
