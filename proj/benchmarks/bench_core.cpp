#include <benchmark/benchmark.h>

#include "finsler/curvature/curvature.hpp"
#include "finsler/derivjet/jet.hpp"
#include "finsler/derivjet/taylor.hpp"
#include "finsler/verify/verify.hpp"

using namespace finsler;
using manifold::ManifoldModel;
using metrics::Generator;
using metrics::MetricSpec;

namespace {

MetricSpec cross02_on(const ManifoldModel& model) { return MetricSpec::alpha1_alpha2(model, Generator::from_name("cross02")); }

void BM_JetProduct(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto space = derivjet::JetSpace::uniform(n, 5);
  std::vector<derivjet::Jet> v;
  for (int i = 0; i < n; ++i) v.push_back(derivjet::Jet::variable(space, i, 0.3 + 0.1 * i));
  for (auto _ : state) {
    derivjet::Jet acc = v[0];
    for (int i = 1; i < n; ++i) acc = acc * v[static_cast<std::size_t>(i)];
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_JetProduct)->Arg(2)->Arg(3)->Arg(6);

void BM_TaylorEvalSquaredNorm(benchmark::State& state) {
  const auto spec = cross02_on(ManifoldModel::hopf_sphere());
  const auto orders = derivjet::all_orders(3, 1, 5);
  const ChartPoint x{0.1, -0.2, 0.1};
  const FiberVector y{0.4, 0.3, -0.8};
  for (auto _ : state) benchmark::DoNotOptimize(derivjet::taylor_eval(spec.squared_norm_field(), x, y, orders));
}
BENCHMARK(BM_TaylorEvalSquaredNorm);

void BM_BerwaldLandsberg(benchmark::State& state) {
  const auto model = state.range(0) == 2 ? ManifoldModel::polar_plane() : ManifoldModel::hopf_sphere();
  const auto spec = cross02_on(model);
  const auto x = model.default_point();
  Eigen::VectorXd yv = Eigen::VectorXd::Constant(model.dimension(), 0.5);
  yv(0) = -0.3;
  const FiberVector y(yv);
  for (auto _ : state) benchmark::DoNotOptimize(curvature::berwald_landsberg_tensors(spec, x, y));
}
BENCHMARK(BM_BerwaldLandsberg)->Arg(2)->Arg(3);

void BM_BusemannHausdorffDensity(benchmark::State& state) {
  const auto model = state.range(0) == 2 ? ManifoldModel::polar_plane() : ManifoldModel::hopf_sphere();
  const auto spec = cross02_on(model);
  for (auto _ : state) benchmark::DoNotOptimize(curvature::bh_density(spec, model.default_point()));
}
BENCHMARK(BM_BusemannHausdorffDensity)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& state) {
  const auto model = ManifoldModel::polar_plane();
  const auto spec = cross02_on(model);
  const auto plan = verify::default_plan(model);
  for (auto _ : state) benchmark::DoNotOptimize(verify::classify(spec, plan));
}
BENCHMARK(BM_Classify)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
