#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "finsler/sampling.hpp"
#include "finsler/verify/verify.hpp"

using namespace finsler;
using namespace finsler::verify;
using metrics::Generator;

namespace {

Generator cross02() { return Generator::from_name("cross02"); }

MetricSpec spec_on(const std::string& model, const std::string& gen = "cross02") {
  return MetricSpec::alpha1_alpha2(manifold::builtin_model(model), Generator::from_name(gen));
}

// c(t) oracle: (1/4) d^3/ds^3 F^2(Y + s U) by central differences
double trace_oracle(const metrics::MinkowskiNorm& norm, const FiberVector& Y, const FiberVector& U) {
  const double h = 1e-3;
  auto q = [&](double s) { return norm.squared(FiberVector(Eigen::VectorXd(Y.coords + s * U.coords))); };
  return 0.25 * (q(2 * h) - 2 * q(h) + 2 * q(-h) - q(-2 * h)) / (2 * h * h * h);
}

}  // namespace

TEST(Classify, FlatProductIsBerwaldNotRiemannian) {
  const auto r = classify(spec_on("flat-product"), default_plan(manifold::builtin_model("flat-product")));
  EXPECT_FALSE(r.riemannian);
  EXPECT_TRUE(r.berwald);
  EXPECT_TRUE(r.landsberg);
  EXPECT_TRUE(r.s_vanishing);
  EXPECT_FALSE(r.consistency_enforced);
}

TEST(Classify, PolarPlaneFlagsNothing) {
  const auto r = classify(spec_on("polar-plane"), default_plan(manifold::builtin_model("polar-plane")));
  EXPECT_FALSE(r.riemannian);
  EXPECT_FALSE(r.berwald);
  EXPECT_FALSE(r.landsberg);
  EXPECT_FALSE(r.s_vanishing);
  EXPECT_GT(r.residuals.landsberg, 1e-6);
}

TEST(Classify, HopfSphereHasVanishingS) {
  const auto r = classify(spec_on("hopf-sphere"), default_plan(manifold::builtin_model("hopf-sphere")));
  EXPECT_FALSE(r.riemannian);
  EXPECT_FALSE(r.berwald);
  EXPECT_FALSE(r.landsberg);
  EXPECT_TRUE(r.s_vanishing);
}

TEST(Classify, RiemannianControlIsRiemannian) {
  for (const auto& name : manifold::builtin_model_names()) {
    const auto model = manifold::builtin_model(name);
    const auto r = classify(MetricSpec::riemannian(model), default_plan(model));
    EXPECT_TRUE(r.riemannian && r.berwald && r.landsberg && r.s_vanishing) << name;
  }
}

TEST(Classify, SmallPlanRejected) {
  const auto model = manifold::builtin_model("polar-plane");
  EXPECT_THROW(classify(spec_on("polar-plane"), default_plan(model, 4, 16)), PreconditionError);
  EXPECT_THROW(classify(spec_on("polar-plane"), default_plan(model, 5, 8)), PreconditionError);
}

TEST(SCurvatureDualPath, PolarPlaneDualPath) {
  const auto model = manifold::builtin_model("polar-plane");
  const auto r = verify_theorem41(cross02(), model, model.default_point(), {{0.6, 0.8}});
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_GT(std::abs(r.rows[0].S_formula), 1e-3);
  EXPECT_LT(r.rows[0].rel_err, 1e-4);
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(verify_theorem41(cross02(), model, model.default_point(), default_directions()).passed);
}

TEST(SCurvatureDualPath, LinearGeneratorVanishes) {
  for (const auto& name : {"polar-plane", "hopf-sphere"}) {
    const auto model = manifold::builtin_model(name);
    const auto r = verify_theorem41(Generator::linear(), model, model.default_point(), default_directions());
    for (const auto& row : r.rows) {
      EXPECT_LT(std::abs(row.S_direct), 2e-5);
      EXPECT_LT(std::abs(row.S_formula), 2e-5);
    }
    EXPECT_TRUE(r.passed);
  }
}

TEST(SCurvatureDualPath, HopfVanishing) {
  const auto model = manifold::builtin_model("hopf-sphere");
  const auto r = verify_theorem41(cross02(), model, model.default_point(), default_directions());
  EXPECT_EQ(r.rows.size(), 8u);
  for (const auto& row : r.rows) {
    EXPECT_LT(std::abs(row.S_direct), 2e-5);
    EXPECT_LT(std::abs(row.S_formula), 2e-5);
  }
  EXPECT_TRUE(r.passed);
}

TEST(SVanishingVerdicts, VerdictsAgreeOnBuiltins) {
  for (const auto& [name, count, vanishing] :
       {std::tuple{"flat-product", 5, true}, std::tuple{"polar-plane", 3, false}, std::tuple{"hopf-sphere", 3, true}}) {
    const auto model = manifold::builtin_model(name);
    const auto plan = default_plan(model, count);
    const auto r = verify_theorem42(cross02(), model, plan.points);
    EXPECT_TRUE(r.passed) << name;
    for (const auto& row : r.rows) {
      EXPECT_EQ(row.identities_hold, vanishing) << name;
      if (!vanishing) EXPECT_GT(row.max_abs_S, 1e-3) << name;
    }
  }
}

TEST(BuiltinPatterns, PolarAndHopf) {
  EXPECT_TRUE(verify_example33().passed);
  EXPECT_TRUE(verify_example33(2.0).passed);
  EXPECT_TRUE(verify_example34().passed);
}

TEST(BuiltinPatterns, NormalChartAndBerwaldCriterion) {
  std::vector<manifold::ManifoldModel> models;
  for (const auto& name : manifold::builtin_model_names()) models.push_back(manifold::builtin_model(name));
  EXPECT_TRUE(verify_lemma31(models).passed);
  EXPECT_TRUE(verify_prop32(cross02(), models).passed);
}

TEST(OperatorInvariance, BlockRotations) {
  const auto model = manifold::builtin_model("hopf-sphere");
  EXPECT_TRUE(verify_lemma51(cross02(), model, {parse_linear_map("block-rotation:30deg", 2, 1)}).passed);
  EXPECT_TRUE(verify_lemma51(cross02(), model, landsberg::block_rotations(2, 1, 5)).passed);
}

TEST(OperatorInvariance, ParseLinearMap) {
  const auto r = parse_linear_map("block-rotation:90deg", 2, 1);
  EXPECT_NEAR(r.xi(1, 0), 1.0, 1e-15);
  EXPECT_NEAR(r.xi(2, 2), 1.0, 1e-15);
  EXPECT_EQ(parse_linear_map("reflection:1,3", 2, 1).xi(2, 2), -1.0);
  EXPECT_EQ(parse_linear_map("matrix:0,1,1,0", 1, 1).xi(0, 1), 1.0);
  EXPECT_THROW(parse_linear_map("block-rotation:30deg", 1, 1), ConfigError);
  EXPECT_THROW(parse_linear_map("shear:2", 2, 1), ConfigError);
  EXPECT_THROW(parse_linear_map("matrix:1,2", 1, 1), ConfigError);
  EXPECT_THROW(parse_linear_map("block-rotation:xdeg", 2, 1), ConfigError);
}

TEST(Indicatrix, EuclideanAndRiemannianVanish) {
  const auto flat = manifold::ManifoldModel::flat_product(1, 1);
  const auto euclid = MetricSpec::riemannian(flat).frozen(ChartPoint::origin(2));
  for (double c : indicatrix_cartan_trace(euclid, 64).trace) EXPECT_LT(std::abs(c), 1e-12);
  const auto polar = manifold::builtin_model("polar-plane");
  const auto riem = MetricSpec::riemannian(polar).frozen(ChartPoint{1.3, 0.4});
  for (double c : indicatrix_cartan_trace(riem, 64).trace) EXPECT_LT(std::abs(c), 1e-10);
}

TEST(Indicatrix, FlatSplitTrace) {
  const auto norm = spec_on("flat-product").frozen(ChartPoint::origin(2));
  const auto tr = indicatrix_cartan_trace(norm, 256);
  ASSERT_EQ(tr.trace.size(), 256u);
  double lo = 1e300;
  double hi = -1e300;
  for (std::size_t k = 0; k < tr.trace.size(); ++k) {
    EXPECT_NEAR(norm(tr.points[k]), 1.0, 1e-10);
    const Eigen::MatrixXd g = metrics::fiber_hessian(norm, tr.points[k]);
    EXPECT_NEAR(tr.tangents[k].coords.dot(g * tr.tangents[k].coords), 1.0, 1e-10);
    // anticlockwise
    EXPECT_GT(tr.points[k].coords(0) * tr.tangents[k].coords(1) - tr.points[k].coords(1) * tr.tangents[k].coords(0), 0.0);
    if (k % 16 == 3) EXPECT_NEAR(tr.trace[k], trace_oracle(norm, tr.points[k], tr.tangents[k]), 1e-5);
    lo = std::min(lo, tr.trace[k]);
    hi = std::max(hi, tr.trace[k]);
  }
  for (int k : {0, 64, 128, 192}) EXPECT_LT(std::abs(tr.trace[static_cast<std::size_t>(k)]), 1e-10);
  EXPECT_GT(hi - lo, 1e-3);
}

TEST(Indicatrix, Preconditions) {
  const auto norm = spec_on("flat-product").frozen(ChartPoint::origin(2));
  EXPECT_THROW(indicatrix_cartan_trace(norm, 32), PreconditionError);
  const auto norm3 = spec_on("hopf-sphere").frozen(ChartPoint::origin(3));
  EXPECT_THROW(indicatrix_cartan_trace(norm3, 64), PreconditionError);
}

TEST(NonLandsbergCertificate, Certificates) {
  EXPECT_THROW(lemma81_certificate(Generator::linear()), PreconditionError);
  const auto c = lemma81_certificate(cross02(), 1.0);
  EXPECT_TRUE(c.passed);
  EXPECT_GT(c.max_landsberg, 1e-6);
  EXPECT_TRUE(c.trace_nonconstant);
  const auto small = lemma81_certificate(Generator::from_name("cross:0.05"), 2.0);
  EXPECT_TRUE(small.passed);
  EXPECT_LT(small.max_landsberg, c.max_landsberg);
}

// property: berwald => landsberg on every per-sample tensor pair
TEST(Classify, PropertyBerwaldImpliesLandsberg) {
  for (const auto& name : manifold::builtin_model_names()) {
    const auto model = manifold::builtin_model(name);
    const auto spec = spec_on(name);
    const auto plan = default_plan(model, 5, 16);
    const auto dirs = sphere_directions(model.dimension(), 16);
    const double tol = 1e-9;
    const double n = model.dimension();
    for (const auto& p : plan.points)
      for (const auto& y : dirs) {
        const auto t = curvature::berwald_landsberg_tensors(spec, p, y);
        EXPECT_FALSE(t.max_berwald < tol && t.max_landsberg >= n * n * tol) << name;
      }
  }
}
