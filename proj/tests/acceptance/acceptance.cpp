// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "finsler/curvature/curvature.hpp"
#include "finsler/derivjet/taylor.hpp"
#include "finsler/landsberg/landsberg.hpp"
#include "finsler/sampling.hpp"
#include "finsler/verify/verify.hpp"

using namespace finsler;
using manifold::ManifoldModel;
using metrics::Generator;
using metrics::MetricSpec;

namespace {

// Tolerances, pinned.
constexpr double kJetFdRel = 1e-5;
constexpr double kClosedFormRel = 1e-8;
constexpr double kS41Rel = 1e-4;
constexpr double kS41Abs = 2e-5;
constexpr double kExampleTol = 1e-8;
constexpr double kKernelTol = 1e-9;
constexpr double kLinearityTol = 1e-10;
constexpr double kAxisTraceTol = 1e-10;
constexpr double kBerwaldTol = 1e-9;
constexpr double kSigmaTol = 1e-8;
constexpr double kCriticalTol = 5e-6;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

double rel(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

Outcome jet_vs_fd() {
  const auto model = ManifoldModel::polar_plane();
  const auto spec = MetricSpec::alpha1_alpha2(model, Generator::from_name("cross02"));
  std::mt19937_64 rng(20261019);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<derivjet::Sample> samples;
  while (samples.size() < 20) {
    const ChartPoint x{1.0 + 0.3 * u(rng), 0.3 * u(rng)};
    const FiberVector y{u(rng), u(rng)};
    if (y.coords.norm() < 0.3) continue;
    samples.push_back({x, y});
  }
  const auto r = derivjet::cross_check(spec.squared_norm_field(), samples, derivjet::all_orders(2, 1, 5), kJetFdRel);
  return {r.passed, "max discrepancy " + fmt(r.max_discrepancy) + " at order " + r.worst_order.to_string()};
}

Outcome closed_forms() {
  double worst = 0.0;
  double worst_det = 0.0;
  double printed_gap = 0.0;
  double fixed_gap = 0.0;
  struct Case {
    ManifoldModel model;
    std::string gen;
  };
  for (const auto& c : {Case{ManifoldModel::polar_plane(), "cross02"}, Case{ManifoldModel::hopf_sphere(), "cross02"},
                        Case{ManifoldModel::flat_product(2, 3), "cross:0.5"}}) {
    const auto report = manifold::normal_chart(c.model, c.model.default_point());
    const auto spec = MetricSpec::alpha1_alpha2(report.chart_model, Generator::from_name(c.gen));
    const int n = c.model.dimension();
    const int n1 = c.model.n1();
    const int n2 = c.model.n2();
    const auto o = ChartPoint::origin(n);
    for (double a : {0.6, -0.3, 0.8}) {
      const double ap = std::sqrt(1.0 - a * a);
      Eigen::VectorXd yv = Eigen::VectorXd::Zero(n);
      yv(0) = a;
      yv(n - 1) = ap;
      const FiberVector y(yv);
      const auto p = spec.generator().partials(a * a, ap * ap);
      const auto ft = curvature::fundamental_tensor(spec, o, y);
      const Eigen::MatrixXd g = curvature::closed_form::g(p, a, ap, n1, n2);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) worst = std::max(worst, rel(ft.g(i, j), g(i, j)));
      // the (1, n) block of g has determinant L1 L2 - 2 L L12
      worst_det = std::max(worst_det, rel(ft.g(0, 0) * ft.g(n - 1, n - 1) -
                                              ft.g(0, n - 1) * ft.g(n - 1, 0),
                                          curvature::closed_form::det_2x2(p)));
      const auto ct = curvature::cartan_tensor(spec, o, y);
      const auto cc = curvature::closed_form::cartan(p, a, ap, n1, n2);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) worst = std::max(worst, rel(ct.C(i, j, k), cc(i, j, k)));
      const Eigen::VectorXd I = curvature::closed_form::mean_cartan(p, a, ap, n1, n2);
      const Eigen::VectorXd Ic = curvature::closed_form::mean_cartan_contra(p, a, ap, n1, n2, false);
      const Eigen::VectorXd Ip = curvature::closed_form::mean_cartan_contra(p, a, ap, n1, n2, true);
      for (int k = 0; k < n; ++k) {
        worst = std::max(worst, rel(ct.I_cov(k), I(k)));
        worst = std::max(worst, rel(ct.I_contra(k), Ic(k)));
      }
      fixed_gap = std::max(fixed_gap, std::abs(ct.I_contra(n - 1) - Ic(n - 1)));
      printed_gap = std::max(printed_gap, std::abs(ct.I_contra(n - 1) - Ip(n - 1)));
      const auto s = curvature::spray(spec, o, y);
      const auto [g1, gn] = curvature::closed_form::spray_cov(p, a, ap, report.A1, report.A2);
      worst = std::max({worst, rel(s.G_cov(0), g1), rel(s.G_cov(n - 1), gn)});
    }
  }
  const bool ok = worst < kClosedFormRel && worst_det < kClosedFormRel && fixed_gap < kClosedFormRel && printed_gap > 1e-3;
  return {ok, "max rel " + fmt(worst) + ", det rel " + fmt(worst_det) + "; I^n: 2LL12 variant off by " +
                  fmt(fixed_gap) + ", printed LL12 variant off by " + fmt(printed_gap) + " (2LL12 variant matches)"};
}

Outcome s_dual_path() {
  const auto polar = ManifoldModel::polar_plane();
  const auto r = verify::verify_theorem41(Generator::from_name("cross02"), polar, polar.default_point(), {{0.6, 0.8}},
                                          kS41Rel);
  const auto hopf = ManifoldModel::hopf_sphere();
  const auto h = verify::verify_theorem41(Generator::from_name("cross02"), hopf, hopf.default_point(),
                                          verify::default_directions(), kS41Rel);
  double hopf_max = 0.0;
  for (const auto& row : h.rows) hopf_max = std::max({hopf_max, std::abs(row.S_direct), std::abs(row.S_formula)});
  const auto& row = r.rows.front();
  const bool ok = row.rel_err < kS41Rel && std::abs(row.S_formula) > verify::kTheorem41Significant && hopf_max <= kS41Abs;
  return {ok, "polar S_direct " + fmt(row.S_direct) + " vs S_formula " + fmt(row.S_formula) + " (rel " +
                  fmt(row.rel_err) + "); hopf max |S| " + fmt(hopf_max)};
}

Outcome s_vanishing_verdicts() {
  int agree = 0;
  int total = 0;
  for (const auto& name : manifold::builtin_model_names()) {
    const auto model = manifold::builtin_model(name);
    const auto plan = verify::default_plan(model, 3, 16);
    const auto r = verify::verify_theorem42(Generator::from_name("cross02"), model, plan.points, kExampleTol, 16);
    for (const auto& row : r.rows) {
      ++total;
      agree += row.agree ? 1 : 0;
    }
  }
  return {agree == total && total >= 9, std::to_string(agree) + "/" + std::to_string(total) + " points agree"};
}

Outcome hopf_pattern() {
  const auto r = verify::verify_example34();
  double worst = 0.0;
  for (const auto& c : r.checks) worst = std::max(worst, std::abs(c.value - c.expected));
  return {r.passed, "max deviation " + fmt(worst) + " over " + std::to_string(r.checks.size()) + " entries"};
}

Outcome operator_invariance() {
  const auto model = ManifoldModel::hopf_sphere();
  const auto r = verify::verify_lemma51(Generator::from_name("cross02"), model,
                                        landsberg::block_rotations(model.n1(), model.n2(), 5), 20);
  const bool ok = r.checks.at(0).value < kKernelTol && r.checks.at(1).value < kLinearityTol;
  return {ok, "kernel residual " + fmt(r.checks.at(0).value) + ", linearity residual " + fmt(r.checks.at(1).value)};
}

Outcome non_landsberg() {
  const auto c = verify::lemma81_certificate(Generator::from_name("cross02"), 1.0);
  const bool ok = c.max_landsberg > 10.0 * c.noise_floor && c.max_landsberg > c.threshold && c.trace_nonconstant &&
                  c.max_axis_trace < kAxisTraceTol;
  return {ok, "max Landsberg " + fmt(c.max_landsberg) + " vs floor " + fmt(c.noise_floor) + ", trace spread " +
                  fmt(c.trace_spread) + ", axis |c| " + fmt(c.max_axis_trace)};
}

Outcome berwald_implies_landsberg() {
  std::mt19937_64 rng(424242);
  std::normal_distribution<double> gauss;
  int violations = 0;
  int samples = 0;
  for (const auto& name : manifold::builtin_model_names()) {
    const auto model = manifold::builtin_model(name);
    const int n = model.dimension();
    const auto points = verify::default_plan(model, 200, 1, 0.2).points;
    for (const auto& spec : {MetricSpec::riemannian(model), MetricSpec::alpha1_alpha2(model, Generator::linear()),
                             MetricSpec::alpha1_alpha2(model, Generator::from_name("cross02"))}) {
      for (const auto& p : points) {
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y(i) = gauss(rng);
        const auto t = curvature::berwald_landsberg_tensors(spec, p, FiberVector(y));
        ++samples;
        if (t.max_berwald < kBerwaldTol && t.max_landsberg >= n * n * kBerwaldTol) ++violations;
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " violations in " + std::to_string(samples) + " samples"};
}

Outcome volume() {
  const auto flat = ManifoldModel::flat_product(1, 1);
  const double euclid = curvature::bh_density(MetricSpec::riemannian(flat), ChartPoint::origin(2)).sigma;
  const auto doubled = MetricSpec::raw("doubled", 2, GenericFunction<XYScalarFn>([](auto, auto y) {
                                         return 4.0 * (y[0] * y[0] + y[1] * y[1]);
                                       }));
  const double four = curvature::bh_density(doubled, ChartPoint::origin(2)).sigma;
  double grad = 0.0;
  for (const auto& model : {ManifoldModel::polar_plane(), ManifoldModel::hopf_sphere()}) {
    const auto report = manifold::normal_chart(model, model.default_point());
    const auto spec = MetricSpec::alpha1_alpha2(report.chart_model, Generator::from_name("cross02"));
    const auto origin = ChartPoint::origin(model.dimension());
    grad = std::max(grad, curvature::log_sigma_gradient(spec, origin).norm());
  }
  const bool ok = std::abs(euclid - 1.0) < kSigmaTol && std::abs(four - 4.0) < kSigmaTol && grad < kCriticalTol;
  return {ok, "sigma " + fmt(euclid) + " and " + fmt(four) + ", |d ln sigma| at normal-chart centers " + fmt(grad)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"jet vs finite differences of F^2, orders (1 in x, 5 in y)", jet_vs_fd},
      {"closed-form g, C, I, G and det g at aligned samples", closed_forms},
      {"S-curvature dual path", s_dual_path},
      {"vanishing-S identity verdicts vs sampled S", s_vanishing_verdicts},
      {"hopf-sphere b-derivative pattern at the identity", hopf_pattern},
      {"Landsberg operator kernel identity and linearity", operator_invariance},
      {"non-Landsberg certificate and indicatrix trace", non_landsberg},
      {"Berwald implies Landsberg over random samples", berwald_implies_landsberg},
      {"volume density and its critical point", volume},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.passed ? 0 : 1;
    std::printf("criterion %zu: %s  %s: %s\n", i + 1, o.passed ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
