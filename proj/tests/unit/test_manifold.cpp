#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "finsler/manifold/normal_chart.hpp"

using namespace finsler;
using namespace finsler::manifold;

namespace {

Monomial mono(double c, std::vector<int> e) { return Monomial{c, std::move(e)}; }

// alpha = I + eps (x1^2 dx1dx1 + x2 x3 (dx2dx3 + dx3dx2)), V2 = (c x1 + d x2 + e, c x1 x2, 1)
ManifoldModel tilted_model(double eps, double c, double d = 1.0, double e = 0.0) {
  PolynomialMatrix alpha(3, std::vector<Polynomial>(3));
  for (int i = 0; i < 3; ++i) alpha[i][i].push_back(mono(1.0, {0, 0, 0}));
  alpha[0][0].push_back(mono(eps, {2, 0, 0}));
  alpha[1][2].push_back(mono(eps, {0, 1, 1}));
  alpha[2][1].push_back(mono(eps, {0, 1, 1}));
  PolynomialMatrix frame(3, std::vector<Polynomial>(1));
  frame[0][0] = {mono(c, {1, 0, 0}), mono(d, {0, 1, 0}), mono(e, {0, 0, 0})};
  frame[1][0] = {mono(c, {1, 1, 0})};
  frame[2][0] = {mono(1.0, {0, 0, 0})};
  return polynomial_model("tilted", 2, 1, alpha, frame, ChartPoint{0.1, -0.2, 0.3});
}

// the pulled-back fields evaluated by hand from the old model, for finite differences
struct ChartOracle {
  const ManifoldModel& model;
  const ChartMap& map;

  Eigen::MatrixXd jac(const Eigen::VectorXd& z) const {
    const int n = map.dimension();
    Eigen::MatrixXd j = map.E;
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) j(i, b) += map.Q(i, b, c) * z(c);
    return j;
  }
  Eigen::VectorXd point(const Eigen::VectorXd& z) const {
    const int n = map.dimension();
    Eigen::VectorXd x = map.p + map.E * z;
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) x(i) += 0.5 * map.Q(i, b, c) * z(b) * z(c);
    return x;
  }
  Eigen::MatrixXd b(const Eigen::VectorXd& z) const {
    const Eigen::VectorXd x = point(z);
    const Eigen::MatrixXd j = jac(z);
    return j.transpose() * primal_matrix(model.b<double>(std::span<const double>(x.data(), x.size()))) * j;
  }
  Eigen::MatrixXd alpha(const Eigen::VectorXd& z) const {
    const Eigen::VectorXd x = point(z);
    const Eigen::MatrixXd j = jac(z);
    return j.transpose() * primal_matrix(model.alpha<double>(std::span<const double>(x.data(), x.size()))) * j;
  }
  template <class F>
  Tensor3 derivative(F f) const {
    const int n = map.dimension();
    const double h = 1e-5;
    Tensor3 t(n);
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(k) = h;
      const Eigen::MatrixXd dm = (f(e) - f(-e)) / (2 * h);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t(k, i, j) = dm(i, j);
    }
    return t;
  }
};

double max_diff(const Tensor3& a, const Tensor3& b) {
  double m = 0.0;
  const int n = a.dimension();
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m = std::max(m, std::abs(a(k, i, j) - b(k, i, j)));
  return m;
}

}  // namespace

TEST(NormalChart, FlatProductIsBerwald) {
  auto model = ManifoldModel::flat_product(2, 2);
  auto r = normal_chart(model, ChartPoint{0.3, -1.0, 2.0, 0.5});
  EXPECT_LT(r.db.max_abs(), 1e-14);
  EXPECT_LT(r.alpha_deviation, 1e-14);
  EXPECT_TRUE(berwald_criterion(r, kChartTolerance));
  EXPECT_TRUE(lemma31_check(model, r, kChartTolerance).passed);
}

TEST(NormalChart, PolarPlaneHasUnitTilt) {
  for (double r0 : {1.0, 2.0, 0.5}) {
    auto model = ManifoldModel::polar_plane(r0);
    auto r = normal_chart(model, ChartPoint{r0, 0.0});
    // V1 is angular: along the circle through p the radial line turns at rate 1/r0
    EXPECT_NEAR(std::abs(r.A1), 1.0 / r0, 1e-12);
    EXPECT_NEAR(r.A2, 0.0, 1e-12);
    EXPECT_FALSE(berwald_criterion(r, kChartTolerance));
    ChartOracle fd{model, r.chart_map};
    EXPECT_LT(max_diff(r.db, fd.derivative([&](const Eigen::VectorXd& z) { return fd.b(z); })), 1e-8);
    EXPECT_TRUE(lemma31_check(model, r, kChartTolerance).passed);
  }
}

TEST(NormalChart, PolarPlaneRotatedPoint) {
  auto model = ManifoldModel::polar_plane();
  const double th = 0.7;
  auto r = normal_chart(model, ChartPoint{2.0 * std::cos(th), 2.0 * std::sin(th)});
  EXPECT_NEAR(std::abs(r.A1), 0.5, 1e-12);
  EXPECT_NEAR(r.A2, 0.0, 1e-12);
}

TEST(NormalChart, HopfAtIdentity) {
  auto model = ManifoldModel::hopf_sphere();
  auto r = normal_chart(model, ChartPoint::origin(3));
  EXPECT_LT(r.alpha_deviation, 1e-14);
  EXPECT_LT(r.christoffel_residual, 1e-7);
  // the vertical field is (-x2, x1, 1) to first order
  EXPECT_NEAR(r.db(0, 1, 2), 1.0, 1e-12);
  EXPECT_NEAR(r.db(1, 0, 2), -1.0, 1e-12);
  EXPECT_NEAR(r.db(0, 1, 2) + r.db(1, 0, 2), 0.0, 1e-12);
  EXPECT_NEAR(r.A1, 0.0, 1e-12);
  EXPECT_NEAR(r.A2, 0.0, 1e-12);
  EXPECT_NEAR(r.db(2, 0, 2), 0.0, 1e-12);
  EXPECT_NEAR(r.db(2, 1, 2), 0.0, 1e-12);
  ChartOracle fd{model, r.chart_map};
  EXPECT_LT(max_diff(r.db, fd.derivative([&](const Eigen::VectorXd& z) { return fd.b(z); })), 1e-8);
  EXPECT_TRUE(lemma31_check(model, r, kChartTolerance).passed);
}

TEST(NormalChart, HopfAwayFromIdentity) {
  auto model = ManifoldModel::hopf_sphere();
  auto r = normal_chart(model, ChartPoint{0.3, -0.4, 0.5});
  EXPECT_LT(r.alpha_deviation, 1e-12);
  EXPECT_LT(r.christoffel_residual, 1e-7);
  // left translations are isometries preserving the Hopf fibers: the tilt is the same everywhere
  double cross = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 2; ++i) cross += r.db(k, i, 2) * r.db(k, i, 2);
  EXPECT_NEAR(cross, 2.0, 1e-9);
  EXPECT_TRUE(lemma31_check(model, r, kChartTolerance).passed);
}

TEST(NormalChart, ChristoffelAgainstDifferences) {
  auto model = ManifoldModel::hopf_sphere();
  const ChartPoint x{0.2, 0.1, -0.3};
  const Tensor3 g = christoffel(model, x);
  const int n = 3;
  const double h = 1e-5;
  std::vector<Eigen::MatrixXd> da;
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd xp = x.coords;
    Eigen::VectorXd xm = x.coords;
    xp(k) += h;
    xm(k) -= h;
    da.push_back((primal_matrix(model.alpha<double>(std::span<const double>(xp.data(), 3))) -
                  primal_matrix(model.alpha<double>(std::span<const double>(xm.data(), 3)))) /
                 (2 * h));
  }
  const Eigen::MatrixXd ainv = primal_matrix(model.alpha<double>(x.span())).inverse();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double want = 0.0;
        for (int l = 0; l < n; ++l) want += 0.5 * ainv(i, l) * (da[j](l, k) + da[k](l, j) - da[l](j, k));
        EXPECT_NEAR(g(i, j, k), want, 1e-8);
      }
}

TEST(NormalChart, TiltedModelAgainstDifferences) {
  auto model = tilted_model(0.3, 0.8);
  auto r = normal_chart(model, model.default_point());
  ChartOracle fd{model, r.chart_map};
  EXPECT_LT(max_diff(r.db, fd.derivative([&](const Eigen::VectorXd& z) { return fd.b(z); })), 1e-8);
  EXPECT_LT(fd.derivative([&](const Eigen::VectorXd& z) { return fd.alpha(z); }).max_abs(), 1e-8);
  EXPECT_LT(r.alpha_deviation, 1e-12);
  EXPECT_LT(r.christoffel_residual, 1e-7);
  auto lemma = lemma31_check(model, r, kChartTolerance);
  EXPECT_TRUE(lemma.passed) << lemma.max_violation;
  EXPECT_FALSE(berwald_criterion(r, kChartTolerance));
}

TEST(NormalChart, ConstantTiltIsBerwald) {
  auto model = tilted_model(0.0, 0.0, 0.0, 1.0);
  auto r = normal_chart(model, model.default_point());
  // V2 = d_1 + d_3 is parallel for the flat metric
  EXPECT_TRUE(berwald_criterion(r, kChartTolerance));
}

TEST(NormalChart, AlignmentMapsToAxes) {
  auto model = tilted_model(0.3, 0.8);
  const FiberVector y{0.4, -1.0, 0.7};
  auto r = normal_chart(model, model.default_point(), y);
  ASSERT_TRUE(r.aligned.has_value());
  const auto& w = r.aligned->coords;
  EXPECT_GT(w(0), 0.0);
  EXPECT_NEAR(w(1), 0.0, 1e-12);
  EXPECT_GT(w(2), 0.0);
  // the new coordinates describe the same tangent vector
  EXPECT_LT((r.chart_map.E * w - y.coords).norm(), 1e-12);
  EXPECT_TRUE(lemma31_check(model, r, kChartTolerance).passed);
}

TEST(NormalChart, AlignmentInsideSubbundleFails) {
  auto model = ManifoldModel::flat_product(1, 2);
  EXPECT_THROW(normal_chart(model, ChartPoint::origin(3), FiberVector{1.0, 0.0, 0.0}), AlignmentError);
  EXPECT_THROW(normal_chart(model, ChartPoint::origin(3), FiberVector{0.0, 1.0, 2.0}), AlignmentError);
}

TEST(NormalChart, RejectsBadProjector) {
  MatrixField half([](auto x) {
    using T = typename decltype(x)::value_type;
    auto m = SmallMatrix<T>::identity(2);
    m(0, 0) = T(0.5);
    m(1, 1) = T(0.5);
    return m;
  });
  MatrixField id([](auto x) {
    using T = typename decltype(x)::value_type;
    return SmallMatrix<T>::identity(2);
  });
  ManifoldModel bad("bad", 1, 1, id, half, {}, ChartPoint::origin(2));
  EXPECT_THROW(normal_chart(bad, ChartPoint::origin(2)), ModelError);
  EXPECT_THROW(normal_chart(ManifoldModel::polar_plane(), ChartPoint{0.0, 0.0}), DomainError);
}

// Property: block rotations keep a chart normal and leave the cross-block tilt's size unchanged.
TEST(NormalChartProperty, BlockRotationFreedom) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto model = tilted_model(0.2, -0.5);
  auto base = normal_chart(model, model.default_point());
  auto cross_norm = [](const NormalChartReport& r) {
    double acc = 0.0;
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 2; ++i) acc += r.db(k, i, 2) * r.db(k, i, 2);
    return acc;
  };
  for (int trial = 0; trial < 20; ++trial) {
    const FiberVector y{u(rng), u(rng), u(rng) + 2.0};
    auto r = normal_chart(model, model.default_point(), y);
    EXPECT_LT(r.alpha_deviation, 1e-12);
    EXPECT_LT(r.christoffel_residual, 1e-7);
    EXPECT_TRUE(lemma31_check(model, r, kChartTolerance).passed);
    EXPECT_NEAR(cross_norm(r), cross_norm(base), 1e-10);
  }
}

// Property: random polynomial models satisfy the structural first-order identities in their normal charts.
TEST(NormalChartProperty, RandomModels) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (int trial = 0; trial < 15; ++trial) {
    auto model = tilted_model(u(rng), 3.0 * u(rng));
    const ChartPoint p{u(rng), u(rng), u(rng)};
    auto r = normal_chart(model, p);
    const auto lemma = lemma31_check(model, r, kChartTolerance);
    EXPECT_TRUE(lemma.passed) << "trial " << trial << " violation " << lemma.max_violation;
    EXPECT_LT(r.christoffel_residual, 1e-7);
    const auto pr = r.chart_model.projector_residual(ChartPoint::origin(3));
    EXPECT_LT(pr.idempotency, kProjectorTolerance);
  }
}
