#include "finsler/verify/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "finsler/manifold/normal_chart.hpp"
#include "finsler/sampling.hpp"

namespace finsler::verify {

namespace {

std::string sample_text(const ChartPoint& p, const FiberVector& y) {
  std::ostringstream os;
  os << "x = (" << p.coords.transpose() << "), y = (" << y.coords.transpose() << ")";
  return os.str();
}

double threshold(double floor, double minimum) { return std::max(kFloorFactor * floor, minimum); }

MetricSpec a1a2(const ManifoldModel& model, const metrics::Generator& gen) {
  return MetricSpec::alpha1_alpha2(model, gen);
}

FiberVector aligned_fiber(int n, double a, double ap) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  y(0) = a;
  y(n - 1) = ap;
  return FiberVector(y);
}

Eigen::MatrixXd givens(int n, int i, int j, double angle) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n, n);
  r(i, i) = r(j, j) = std::cos(angle);
  r(i, j) = -std::sin(angle);
  r(j, i) = std::sin(angle);
  return r;
}

}  // namespace

std::string SamplePlan::describe() const {
  std::ostringstream os;
  os << points.size() << " points x " << directions << " directions (" << sequence << ")";
  return os.str();
}

SamplePlan default_plan(const ManifoldModel& model, int points, int directions, double radius) {
  if (points < 1 || directions < 1) throw PreconditionError("sample plan needs at least one point and direction");
  SamplePlan plan;
  plan.points = points_around(model.default_point(), radius, points, [&model](const Eigen::VectorXd& x) {
    return model.in_domain(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  });
  plan.directions = directions;
  plan.sequence = "halton points, " + sphere_sequence_name(model.dimension()) + " directions";
  return plan;
}

Residuals max_residuals(const MetricSpec& spec, const SamplePlan& plan, int nodes) {
  Residuals r;
  const int n = spec.dimension();
  const auto dirs = sphere_directions(n, plan.directions);
  for (const auto& p : plan.points) {
    Eigen::VectorXd grad;
    try {
      grad = curvature::log_sigma_gradient(spec, p, curvature::kDefaultSigmaStep, nodes);
    } catch (const Error& e) {
      std::ostringstream os;
      os << e.what() << " (at x = (" << p.coords.transpose() << "))";
      throw EvaluationError(os.str());
    }
    for (const auto& y : dirs) {
      try {
        const auto c = curvature::cartan_tensor(spec, p, y);
        r.mean_cartan = std::max(r.mean_cartan, c.I_cov.cwiseAbs().maxCoeff());
        const auto t = curvature::berwald_landsberg_tensors(spec, p, y);
        r.berwald = std::max(r.berwald, t.max_berwald);
        r.landsberg = std::max(r.landsberg, t.max_landsberg);
        r.s = std::max(r.s, std::abs(curvature::s_curvature_at(spec, p, y, grad).S));
      } catch (const Error& e) {
        throw EvaluationError(std::string(e.what()) + " (at " + sample_text(p, y) + ")");
      }
    }
  }
  return r;
}

ClassificationReport classify(const MetricSpec& spec, const SamplePlan& plan, int nodes) {
  if (plan.points.size() < 5 || plan.directions < 16) {
    throw PreconditionError("classify: the plan must cover at least 5 points x 16 directions, got " + plan.describe());
  }
  ClassificationReport r;
  r.plan = plan.describe();
  r.samples = static_cast<int>(plan.points.size()) * plan.directions;
  r.noise_floor = max_residuals(MetricSpec::riemannian(spec.model()), plan, nodes);
  r.residuals = max_residuals(spec, plan, nodes);
  r.tolerances = {threshold(r.noise_floor.mean_cartan, kTensorMinimum), threshold(r.noise_floor.berwald, kTensorMinimum),
                  threshold(r.noise_floor.landsberg, kTensorMinimum), threshold(r.noise_floor.s, kSMinimum)};
  r.riemannian = r.residuals.mean_cartan < r.tolerances.mean_cartan;
  r.berwald = r.residuals.berwald < r.tolerances.berwald;
  r.landsberg = r.residuals.landsberg < r.tolerances.landsberg;
  r.s_vanishing = r.residuals.s < r.tolerances.s;
  if (r.berwald && (!r.landsberg || !r.s_vanishing)) {
    r.consistency_enforced = true;
    r.landsberg = r.s_vanishing = true;
  }
  return r;
}

std::vector<std::pair<double, double>> default_directions() {
  return {{0.6, 0.8}, {0.8, 0.6}, {-0.6, 0.8}, {0.6, -0.8}, {0.28, 0.96}, {0.96, -0.28}, {-0.8, -0.6}, {0.5, std::sqrt(0.75)}};
}

Theorem41Report verify_theorem41(const metrics::Generator& gen, const ManifoldModel& model, const ChartPoint& p,
                                 const std::vector<std::pair<double, double>>& directions, double tol_rel, int nodes) {
  const auto chart = manifold::normal_chart(model, p);
  const auto spec = a1a2(chart.chart_model, gen);
  const int n = model.dimension();
  const auto origin = ChartPoint::origin(n);
  const Eigen::VectorXd grad = curvature::log_sigma_gradient(spec, origin, curvature::kDefaultSigmaStep, nodes);
  Theorem41Report r;
  r.A1 = chart.A1;
  r.A2 = chart.A2;
  r.passed = true;
  for (const auto& [a, ap] : directions) {
    Theorem41Row row;
    row.a = a;
    row.a_prime = ap;
    row.S_formula = curvature::s_curvature_formula(spec, chart, a, ap).S_formula;
    row.S_direct = curvature::s_curvature_at(spec, origin, aligned_fiber(n, a, ap), grad).S;
    row.abs_err = std::abs(row.S_direct - row.S_formula);
    row.rel_err = row.abs_err / std::max(std::abs(row.S_formula), 1e-300);
    row.passed = std::abs(row.S_formula) > kTheorem41Significant ? row.rel_err < tol_rel : row.abs_err < kTheorem41Absolute;
    r.passed = r.passed && row.passed;
    r.rows.push_back(row);
  }
  return r;
}

Theorem42Report verify_theorem42(const metrics::Generator& gen, const ManifoldModel& model,
                                 const std::vector<ChartPoint>& points, double tol, int directions, int nodes) {
  SamplePlan plan;
  plan.points = points;
  plan.directions = directions;
  const double floor = max_residuals(MetricSpec::riemannian(model), plan, nodes).s;
  Theorem42Report r;
  r.s_threshold = threshold(floor, kTheorem41Absolute);
  r.passed = true;
  const auto spec = a1a2(model, gen);
  const auto dirs = sphere_directions(model.dimension(), directions);
  for (const auto& p : points) {
    Theorem42Row row;
    row.p = p;
    const auto id = curvature::s_vanishing_identities(manifold::normal_chart(model, p), tol);
    row.identities_hold = id.holds;
    row.identity_violation = id.max_violation;
    const Eigen::VectorXd grad = curvature::log_sigma_gradient(spec, p, curvature::kDefaultSigmaStep, nodes);
    for (const auto& y : dirs) row.max_abs_S = std::max(row.max_abs_S, std::abs(curvature::s_curvature_at(spec, p, y, grad).S));
    row.s_vanishes = row.max_abs_S < r.s_threshold;
    row.agree = row.identities_hold == row.s_vanishes;
    r.passed = r.passed && row.agree;
    r.rows.push_back(row);
  }
  return r;
}

Check near(std::string name, double value, double expected, double tolerance) {
  return {std::move(name), value, expected, tolerance, std::abs(value - expected) <= tolerance};
}

Check above(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, 0.0, value > threshold};
}

CheckReport collect(std::vector<Check> checks) {
  CheckReport r;
  r.passed = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  r.checks = std::move(checks);
  return r;
}

CheckReport verify_example33(double r0) {
  const auto model = ManifoldModel::polar_plane(r0);
  const auto chart = manifold::normal_chart(model, model.default_point());
  const auto l31 = manifold::lemma31_check(model, chart, kIdentityTolerance);
  return collect({near("|A1|", std::abs(chart.A1), 1.0 / r0, kIdentityTolerance),
                  near("A2", chart.A2, 0.0, kIdentityTolerance),
                  near("lemma31 violation", l31.max_violation, 0.0, kIdentityTolerance),
                  near("berwald criterion", manifold::berwald_criterion(chart, kIdentityTolerance) ? 1.0 : 0.0, 0.0, 0.0)});
}

CheckReport verify_example34() {
  const auto model = ManifoldModel::hopf_sphere();
  const auto chart = manifold::normal_chart(model, ChartPoint::origin(3));
  const auto& db = chart.db;
  std::vector<Check> checks;
  // db(k, i, j) = d_{x^k} b_ij, 0-based
  checks.push_back(near("d1 b13", db(0, 0, 2), 0.0, kIdentityTolerance));
  checks.push_back(near("d2 b23", db(1, 1, 2), 0.0, kIdentityTolerance));
  checks.push_back(near("d3 b13", db(2, 0, 2), 0.0, kIdentityTolerance));
  checks.push_back(near("d3 b23", db(2, 1, 2), 0.0, kIdentityTolerance));
  checks.push_back(near("d1 b23 + d2 b13", db(0, 1, 2) + db(1, 0, 2), 0.0, kIdentityTolerance));
  checks.push_back(near("|d1 b23|", std::abs(db(0, 1, 2)), 1.0, kIdentityTolerance));
  checks.push_back(near("|d2 b13|", std::abs(db(1, 0, 2)), 1.0, kIdentityTolerance));
  double block = 0.0;
  for (int k = 0; k < 3; ++k) {
    block = std::max({block, std::abs(db(k, 0, 0)), std::abs(db(k, 0, 1)), std::abs(db(k, 1, 1)), std::abs(db(k, 2, 2))});
  }
  checks.push_back(near("block entries", block, 0.0, kIdentityTolerance));
  checks.push_back(near("berwald criterion", manifold::berwald_criterion(chart, kIdentityTolerance) ? 1.0 : 0.0, 0.0, 0.0));
  return collect(std::move(checks));
}

CheckReport verify_lemma31(const std::vector<ManifoldModel>& models, double tol) {
  std::vector<Check> checks;
  for (const auto& model : models) {
    const auto chart = manifold::normal_chart(model, model.default_point());
    const auto r = manifold::lemma31_check(model, chart, tol);
    checks.push_back(near(model.name() + " max violation", r.max_violation, 0.0, tol));
  }
  return collect(std::move(checks));
}

CheckReport verify_prop32(const metrics::Generator& gen, const std::vector<ManifoldModel>& models, int nodes) {
  std::vector<Check> checks;
  for (const auto& model : models) {
    const auto chart = manifold::normal_chart(model, model.default_point());
    const bool criterion = manifold::berwald_criterion(chart, kIdentityTolerance);
    const auto report = classify(a1a2(model, gen), default_plan(model), nodes);
    // the criterion is sufficient, so criterion => berwald flag
    checks.push_back(near(model.name() + " criterion implies berwald", criterion && !report.berwald ? 1.0 : 0.0, 0.0, 0.0));
  }
  return collect(std::move(checks));
}

landsberg::LinearMap parse_linear_map(const std::string& text, int n1, int n2) {
  const int n = n1 + n2;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "identity") return landsberg::LinearMap::identity(n);
  if (kind == "block-rotation") {
    std::string num = arg;
    if (num.size() > 3 && num.substr(num.size() - 3) == "deg") num.resize(num.size() - 3);
    char* end = nullptr;
    const double deg = std::strtod(num.c_str(), &end);
    if (num.empty() || *end != '\0') throw ConfigError("--xi: bad angle in '" + text + "'");
    const double angle = deg * std::numbers::pi / 180.0;
    if (n1 >= 2) {
      return landsberg::LinearMap::block(givens(n1, 0, 1, angle), Eigen::MatrixXd::Identity(n2, n2));
    }
    if (n2 >= 2) {
      return landsberg::LinearMap::block(Eigen::MatrixXd::Identity(n1, n1), givens(n2, 0, 1, angle));
    }
    throw ConfigError("--xi: block-rotation needs a block of size at least 2");
  }
  if (kind == "reflection") {
    std::vector<int> idx;
    std::istringstream is(arg);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      try {
        const int i = std::stoi(tok);
        if (i < 1 || i > n) throw ConfigError("--xi: reflection index out of range in '" + text + "'");
        idx.push_back(i - 1);
      } catch (const std::logic_error&) {
        throw ConfigError("--xi: bad reflection index in '" + text + "'");
      }
    }
    return landsberg::LinearMap::reflection(n, idx);
  }
  if (kind == "matrix") {
    std::vector<double> v;
    std::istringstream is(arg);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      try {
        v.push_back(std::stod(tok));
      } catch (const std::logic_error&) {
        throw ConfigError("--xi: bad matrix entry in '" + text + "'");
      }
    }
    if (static_cast<int>(v.size()) != n * n) throw ConfigError("--xi: matrix needs n*n entries");
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = v[static_cast<std::size_t>(i * n + j)];
    try {
      return landsberg::LinearMap::from_matrix(m);
    } catch (const PreconditionError& e) {
      throw ConfigError(std::string("--xi: ") + e.what());
    }
  }
  throw ConfigError("--xi: unknown map '" + text + "' (expected identity, block-rotation:<deg>deg, reflection:<i,...>, matrix:<...>)");
}

CheckReport verify_lemma51(const metrics::Generator& gen, const ManifoldModel& model,
                           const std::vector<landsberg::LinearMap>& maps, int fibers) {
  const auto chart = manifold::normal_chart(model, model.default_point());
  const auto spec = a1a2(chart.chart_model, gen);
  const auto origin = ChartPoint::origin(model.dimension());
  const auto norm = spec.frozen(origin);
  const auto f = landsberg::canonical_f(spec, origin);
  const auto samples = sphere_directions(model.dimension(), fibers);
  std::vector<Check> checks;
  double kernel = 0.0;
  double linearity = 0.0;
  for (const auto& map : maps) {
    const auto r = landsberg::invariance_check(norm, map, f, samples);
    kernel = std::max(kernel, r.kernel_residual);
    const auto h = landsberg::isometry_action(map, f);
    const auto sum = landsberg::combine(2.0, f, 3.0, h);
    for (const auto& y : samples) {
      const Eigen::VectorXd lhs = landsberg::landsberg_operator(norm, sum, y);
      const Eigen::VectorXd rhs =
          2.0 * landsberg::landsberg_operator(norm, f, y) + 3.0 * landsberg::landsberg_operator(norm, h, y);
      linearity = std::max(linearity, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  }
  checks.push_back(near("kernel identity", kernel, 0.0, 1e-9));
  checks.push_back(near("linearity", linearity, 0.0, 1e-10));
  return collect(std::move(checks));
}

IndicatrixTrace indicatrix_cartan_trace(const metrics::MinkowskiNorm& norm, int num_angles) {
  if (norm.dimension() != 2) throw PreconditionError("indicatrix trace needs a 2-dimensional norm");
  if (num_angles < 64) throw PreconditionError("indicatrix trace needs at least 64 angles");
  IndicatrixTrace tr;
  for (int k = 0; k < num_angles; ++k) {
    const double t = 2.0 * std::numbers::pi * k / num_angles;
    const FiberVector u{std::cos(t), std::sin(t)};
    const Eigen::Vector2d du(-std::sin(t), std::cos(t));
    const Jet j = norm.jet(u, 3);
    Eigen::Matrix2d g;
    g << 0.5 * j.partial(std::vector<int>{2, 0}), 0.5 * j.partial(std::vector<int>{1, 1}), 0.5 * j.partial(std::vector<int>{1, 1}), 0.5 * j.partial(std::vector<int>{0, 2});
    const double F = std::sqrt(j.value());
    Eigen::LLT<Eigen::Matrix2d> llt(g);
    if (llt.info() != Eigen::Success || !(F > 0.0)) {
      std::ostringstream os;
      os << "indicatrix: strong convexity fails at t = " << t;
      throw ConvexityError(os.str());
    }
    // Y = u / F(u); dY/dt = (du - u dF(du) / F) / F with dF = g u / F
    const Eigen::Vector2d Y = u.coords / F;
    const Eigen::Vector2d dY = (du - u.coords * (u.coords.dot(g * du) / (F * F))) / F;
    const Eigen::Vector2d U = dY / std::sqrt(dY.dot(g * dY));  // g is 0-homogeneous
    // C is (-1)-homogeneous: C_Y = F(u) C_u
    double c = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int d = 0; d < 2; ++d) {
          std::vector<int> e{0, 0};
          ++e[a];
          ++e[b];
          ++e[d];
          c += 0.25 * j.partial(e) * U(a) * U(b) * U(d);
        }
    tr.angles.push_back(t);
    tr.points.emplace_back(Eigen::VectorXd(Y));
    tr.tangents.emplace_back(Eigen::VectorXd(U));
    tr.trace.push_back(F * c);
  }
  return tr;
}

Lemma81Certificate lemma81_certificate(const metrics::Generator& gen, double r0, double tol) {
  if (gen.is_linear()) {
    throw PreconditionError("lemma81: generator '" + gen.name() + "' is linear, so the metric is Riemannian");
  }
  const auto model = ManifoldModel::polar_plane(r0);
  const auto plan = default_plan(model, 5, 16, 0.1 * r0);
  const auto spec = a1a2(model, gen);
  const auto control = MetricSpec::riemannian(model);
  Lemma81Certificate c;
  const auto dirs = sphere_directions(2, plan.directions);
  for (const auto& p : plan.points) {
    for (const auto& y : dirs) {
      c.noise_floor = std::max(c.noise_floor, curvature::berwald_landsberg_tensors(control, p, y).max_landsberg);
      const double l = curvature::berwald_landsberg_tensors(spec, p, y).max_landsberg;
      if (l > c.max_landsberg) {
        c.max_landsberg = l;
        c.witness_p = p;
        c.witness_y = y;
      }
    }
  }
  c.threshold = threshold(c.noise_floor, tol);
  const auto chart = manifold::normal_chart(model, model.default_point());
  const auto norm = a1a2(chart.chart_model, gen).frozen(ChartPoint::origin(2));
  const auto tr = indicatrix_cartan_trace(norm, 256);
  const auto [lo, hi] = std::minmax_element(tr.trace.begin(), tr.trace.end());
  c.trace_spread = *hi - *lo;
  c.trace_nonconstant = c.trace_spread > 1e-6;
  for (int k : {0, 64, 128, 192}) c.max_axis_trace = std::max(c.max_axis_trace, std::abs(tr.trace[static_cast<std::size_t>(k)]));
  c.passed = c.max_landsberg > c.threshold && c.trace_nonconstant && c.max_axis_trace < 1e-10;
  return c;
}

}  // namespace finsler::verify
