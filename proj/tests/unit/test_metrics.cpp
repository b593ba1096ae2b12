#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "finsler/metrics/metric.hpp"
#include "finsler/sampling.hpp"

using namespace finsler;
using namespace finsler::metrics;
using manifold::ManifoldModel;

namespace {

VectorField constant_beta(std::vector<double> b) {
  return VectorField([b](auto x) {
    using T = typename decltype(x)::value_type;
    return std::vector<T>(b.begin(), b.end());
  });
}

}  // namespace

TEST(Expression, ParsesPrecedenceAndFunctions) {
  auto e = Expression::parse("s + t * 2 ^ 2 - -s / 4 + sqrt(t) + exp(0) + log(1) + sin(0) + cos(0)");
  EXPECT_DOUBLE_EQ(e.evaluate(1.0, 9.0), 1.0 + 36.0 + 0.25 + 3.0 + 1.0 + 0.0 + 0.0 + 1.0);
  EXPECT_DOUBLE_EQ(Expression::parse("2^3^2").evaluate(0.0, 0.0), 512.0);
  EXPECT_DOUBLE_EQ(Expression::parse("-2^2").evaluate(0.0, 0.0), -4.0);
  EXPECT_DOUBLE_EQ(Expression::parse("r^0.5").evaluate(0.0, 0.0, 4.0), 2.0);
}

TEST(Expression, ReportsColumn) {
  try {
    Expression::parse("s + (t * 2");
    FAIL();
  } catch (const ExpressionError& e) {
    EXPECT_EQ(e.position(), 10u);
  }
  EXPECT_THROW(Expression::parse("s + q"), ExpressionError);
  EXPECT_THROW(Expression::parse("s +"), ExpressionError);
  EXPECT_THROW(Expression::parse("s t"), ExpressionError);
}

TEST(Generator, RegistryNames) {
  EXPECT_EQ(Generator::from_name("cross02").name(), "cross02");
  EXPECT_DOUBLE_EQ(Generator::from_name("cross02")(1.0, 1.0), 2.1);
  EXPECT_DOUBLE_EQ(Generator::from_name("cross:0.5")(1.0, 1.0), 2.25);
  EXPECT_DOUBLE_EQ(Generator::from_name("s + t + s*t/(s+t)")(1.0, 1.0), 2.5);
  EXPECT_DOUBLE_EQ(Generator::from_name("expr:sqrt(s*s + t*t) + s")(3.0, 4.0), 8.0);
  EXPECT_THROW(Generator::from_name("cross:abc"), ConfigError);
  EXPECT_THROW(Generator::from_name("s + u"), ConfigError);
}

TEST(Generator, JetPartialsOfCross) {
  auto g = Generator::cross(0.2);
  const double s = 0.36;
  const double t = 0.64;
  auto p = g.partials(s, t);
  // h = s t / (s + t): h_s = t^2/(s+t)^2, h_ss = -2 t^2/(s+t)^3, h_st = 2 s t/(s+t)^3
  const double u = s + t;
  EXPECT_NEAR(p.L, s + t + 0.2 * s * t / u, 1e-15);
  EXPECT_NEAR(p.L1, 1 + 0.2 * t * t / (u * u), 1e-15);
  EXPECT_NEAR(p.L11, -0.4 * t * t / (u * u * u), 1e-15);
  EXPECT_NEAR(p.L12, 0.4 * s * t / (u * u * u), 1e-15);
  EXPECT_NEAR(p.L112, 0.2 * (-4 * t / std::pow(u, 3) + 6 * t * t / std::pow(u, 4)), 1e-14);
}

TEST(Generator, UserPartialsAreCrossChecked) {
  GenericFunction<BivariateFn> L([](const auto& s, const auto& t) { return s + t + s * t / (s + t); });
  PartialsClosure good = [](double s, double t) {
    LPartials p;
    const double u = s + t;
    p.L = s + t + s * t / u;
    p.L1 = 1 + t * t / (u * u);
    p.L2 = 1 + s * s / (u * u);
    p.L11 = -2 * t * t / std::pow(u, 3);
    p.L12 = 2 * s * t / std::pow(u, 3);
    p.L22 = -2 * s * s / std::pow(u, 3);
    p.L111 = 6 * t * t / std::pow(u, 4);
    p.L112 = -4 * t / std::pow(u, 3) + 6 * t * t / std::pow(u, 4);
    p.L122 = (-4 * s / std::pow(u, 3) + 6 * s * s / std::pow(u, 4));
    p.L222 = 6 * s * s / std::pow(u, 4);
    return p;
  };
  EXPECT_NO_THROW(Generator("user", L, good));
  PartialsClosure bad = [good](double s, double t) {
    auto p = good(s, t);
    p.L12 *= 1.001;
    return p;
  };
  EXPECT_THROW(Generator("user", L, bad), InvalidGeneratorError);
}

TEST(Generator, PartialAtJetArguments) {
  auto g = Generator::cross(0.2);
  auto space = derivjet::JetSpace::uniform(1, 3);
  const Jet y = Jet::variable(space, 0, 0.7);
  const Jet s = y * y;
  const Jet t = 1.0 - y;
  const Jet l1 = g.partial(1, 0, s, t);
  // oracle: central differences of L1(y^2, 1 - y) in y
  auto L1 = [&](double v) { return g.partials(v * v, 1.0 - v).L1; };
  EXPECT_NEAR(l1.value(), L1(0.7), 1e-15);
  const double h = 1e-5;
  const int e1[1] = {1};
  EXPECT_NEAR(l1.partial(e1), (L1(0.7 + h) - L1(0.7 - h)) / (2 * h), 1e-8);
}

TEST(NormValue, SpecExamples) {
  auto euclid = MetricSpec::alpha1_alpha2(ManifoldModel::flat_product(), Generator::linear());
  EXPECT_DOUBLE_EQ(norm_value(euclid, ChartPoint{0, 0}, FiberVector{3, 4}), 5.0);
  auto cross = MetricSpec::alpha1_alpha2(ManifoldModel::flat_product(), Generator::cross(0.2));
  EXPECT_DOUBLE_EQ(norm_value(cross, ChartPoint{0, 0}, FiberVector{1, 0}), 1.0);
  auto randers = MetricSpec::randers(ManifoldModel::flat_product(), constant_beta({0.5, 0.0}));
  EXPECT_DOUBLE_EQ(norm_value(randers, ChartPoint{0, 0}, FiberVector{1, 0}), 1.5);
}

TEST(NormValue, Errors) {
  auto cross = MetricSpec::alpha1_alpha2(ManifoldModel::flat_product(), Generator::cross(0.2));
  EXPECT_THROW(norm_value(cross, ChartPoint{0, 0}, FiberVector{0, 0}), DomainError);
  auto neg = MetricSpec::alpha1_alpha2(ManifoldModel::flat_product(), Generator::from_name("s - 2*t"));
  EXPECT_THROW(norm_value(neg, ChartPoint{0, 0}, FiberVector{0, 1}), InvalidGeneratorError);
  auto polar = MetricSpec::alpha1_alpha2(ManifoldModel::polar_plane(), Generator::linear());
  EXPECT_THROW(norm_value(polar, ChartPoint{0, 0}, FiberVector{0, 1}), DomainError);
}

TEST(NormValue, AlphaSquaredSplitsExactly) {
  auto spec = MetricSpec::alpha1_alpha2(ManifoldModel::polar_plane(), Generator::linear());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    ChartPoint x{u(rng) + 3.0, u(rng)};
    FiberVector y{u(rng), u(rng)};
    EXPECT_NEAR(norm_value(spec, x, y), y.coords.norm(), 1e-14);
  }
}

TEST(Validate, EuclideanPasses) {
  auto spec = MetricSpec::alpha1_alpha2(ManifoldModel::flat_product(), Generator::linear());
  auto r = validate_norm(spec, ChartPoint{0.3, -1.0}, 16, 1e-9);
  EXPECT_TRUE(r.passed());
  EXPECT_NEAR(r.min_hessian_eigenvalue, 1.0, 1e-14);
  EXPECT_LT(r.euler_residual_max, 1e-15);
}

TEST(Validate, CrossIsStronglyConvex) {
  auto spec = MetricSpec::alpha1_alpha2(ManifoldModel::flat_product(), Generator::cross(0.2));
  auto r = validate_norm(spec, ChartPoint{0, 0}, 64, 1e-9);
  EXPECT_TRUE(r.convexity_ok);
  EXPECT_GT(r.min_hessian_eigenvalue, 0.0);
  // oracle: direct eigenvalue scan with a finer grid of hand-assembled Hessians
  double lo = 1e300;
  for (int k = 0; k < 720; ++k) {
    const double th = 2 * M_PI * k / 720;
    const double a = std::cos(th);
    const double b = std::sin(th);
    auto p = Generator::cross(0.2).partials(a * a, b * b);
    Eigen::Matrix2d g;
    g << p.L1 + 2 * a * a * p.L11, 2 * a * b * p.L12, 2 * a * b * p.L12, p.L2 + 2 * b * b * p.L22;
    lo = std::min(lo, Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(g).eigenvalues().minCoeff());
  }
  EXPECT_GE(r.min_hessian_eigenvalue, lo - 1e-12);
}

TEST(Validate, QuarticFailsOnAxes) {
  auto spec = raw_test_metric("quartic-test");
  auto r = validate_norm(spec, ChartPoint{0, 0}, 16, 1e-9);
  EXPECT_FALSE(r.convexity_ok);
  EXPECT_TRUE(r.positivity_ok);
  EXPECT_TRUE(r.homogeneity_ok);
  // worst direction is an axis: one coordinate vanishes
  EXPECT_LT(std::min(std::abs(r.worst_direction.coords(0)), std::abs(r.worst_direction.coords(1))), 1e-12);
  EXPECT_NEAR(r.min_hessian_eigenvalue, 0.0, 1e-12);
}

TEST(Validate, RejectsTooFewDirections) {
  auto spec = MetricSpec::alpha1_alpha2(ManifoldModel::flat_product(), Generator::linear());
  EXPECT_THROW(validate_norm(spec, ChartPoint{0, 0}, 4, 1e-9), PreconditionError);
}

// Properties

TEST(MetricProperty, EulerIdentitiesOfHomogeneousGenerators) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (const char* name : {"linear", "cross02", "cross:0.05", "sqrt(s*s + t*t + s*t)", "s + t + s*t*(s-t)^2/(s+t)^3"}) {
    auto g = Generator::from_name(name);
    for (int i = 0; i < 40; ++i) {
      const double s = u(rng);
      const double t = u(rng);
      auto p = g.partials(s, t);
      const double scale = std::max({std::abs(p.L11), std::abs(p.L12), std::abs(p.L22), 1e-300}) * (s + t);
      EXPECT_NEAR(s * p.L1 + t * p.L2, p.L, 1e-12 * p.L) << name;
      EXPECT_NEAR(s * p.L11 + t * p.L12, 0.0, 1e-9 * std::max(scale, 1.0)) << name;
      EXPECT_NEAR(s * p.L12 + t * p.L22, 0.0, 1e-9 * std::max(scale, 1.0)) << name;
    }
  }
}

TEST(MetricProperty, RandersEqualsAlphaBetaWithLinearProfile) {
  auto model = ManifoldModel::polar_plane();
  VectorField beta([](auto x) {
    using T = typename decltype(x)::value_type;
    return std::vector<T>{0.2 * x[1], T(0.1) + 0.05 * x[0] * x[0]};
  });
  auto randers = MetricSpec::randers(model, beta);
  auto ab = MetricSpec::alpha_beta(model, beta, GenericFunction<UnivariateFn>([](const auto& r) { return 1.0 + r; }));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    ChartPoint x{1.5 + u(rng), u(rng)};
    FiberVector y{u(rng), u(rng) + 0.1};
    const double a = norm_value(randers, x, y);
    const double b = norm_value(ab, x, y);
    EXPECT_NEAR(a, b, 1e-12 * a);
  }
}

TEST(MetricProperty, HomogeneityAcrossFamilies) {
  std::vector<MetricSpec> specs{
      MetricSpec::riemannian(ManifoldModel::hopf_sphere()),
      MetricSpec::alpha1_alpha2(ManifoldModel::hopf_sphere(), Generator::cross(0.2)),
      MetricSpec::randers(ManifoldModel::flat_product(), constant_beta({0.3, -0.2})),
  };
  for (const auto& spec : specs) {
    const int n = spec.dimension();
    for (const auto& u : sphere_directions(n, 30)) {
      const ChartPoint x = ChartPoint::origin(n);
      const double f = norm_value(spec, x, u);
      for (double lambda : {0.5, 2.0, 7.0}) {
        EXPECT_NEAR(norm_value(spec, x, FiberVector(Eigen::VectorXd(lambda * u.coords))), lambda * f, 1e-12 * lambda * f);
      }
    }
  }
}

TEST(Sampling, SphereDirectionsAreUnitAndDeterministic) {
  for (int n : {2, 3, 4, 5}) {
    auto a = sphere_directions(n, 40);
    auto b = sphere_directions(n, 40);
    ASSERT_EQ(a.size(), 40u);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(a[i].coords.norm(), 1.0, 1e-14);
      EXPECT_EQ(a[i].coords, b[i].coords);
    }
  }
  auto c = sphere_directions(2, 16);
  EXPECT_DOUBLE_EQ(c[4].coords(0), std::cos(M_PI / 2));
}
