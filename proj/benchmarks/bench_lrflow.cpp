#include <benchmark/benchmark.h>

#include "random_cases.hpp"

namespace {

using namespace lrflow;
using lrflow::testing::Case;

void BM_Expm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  lrflow::testing::Random rng(7);
  const Eigen::MatrixXd a = rng.skew(n).matrix();
  for (auto _ : state) benchmark::DoNotOptimize(expm(a));
}
BENCHMARK(BM_Expm)->DenseRange(3, 8);

void BM_InertiaSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  lrflow::testing::Random rng(11);
  const InertiaOperator op = rng.inertia(n);
  const SkewMatrix y = rng.skew(n);
  for (auto _ : state) benchmark::DoNotOptimize(op.solve(y));
}
BENCHMARK(BM_InertiaSolve)->DenseRange(3, 8);

// Field evaluations and single steps share the same case table.
enum class Family { kLr, kLPlusR, kCoupled, kSupport, kRubberChaplygin };

Case make_case(Family f, int n) {
  switch (f) {
    case Family::kLr: return lrflow::testing::lr_case(n, 3);
    case Family::kLPlusR: return lrflow::testing::lplusr_case(n, 3);
    case Family::kCoupled: return lrflow::testing::coupled_full_case(n, 3);
    case Family::kSupport: return lrflow::testing::support_case(n, 3, true);
    case Family::kRubberChaplygin: return lrflow::testing::rubber_chaplygin_case(n, 3);
  }
  return {};
}

void BM_Rate(benchmark::State& state, Family f) {
  const Case c = make_case(f, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(c.system->rate(c.initial));
}

void BM_Step(benchmark::State& state, Family f, Method m) {
  const Case c = make_case(f, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(step(*c.system, c.initial, 1e-3, m));
}

BENCHMARK_CAPTURE(BM_Rate, lr, Family::kLr)->DenseRange(3, 6);
BENCHMARK_CAPTURE(BM_Rate, lplusr, Family::kLPlusR)->DenseRange(3, 6);
BENCHMARK_CAPTURE(BM_Rate, coupled, Family::kCoupled)->DenseRange(3, 6);
BENCHMARK_CAPTURE(BM_Rate, rubber_support, Family::kSupport)->DenseRange(3, 6);
BENCHMARK_CAPTURE(BM_Rate, rubber_chaplygin, Family::kRubberChaplygin)->DenseRange(3, 6);

BENCHMARK_CAPTURE(BM_Step, lr_projected, Family::kLr, Method::kRk4Projected)->DenseRange(3, 6);
BENCHMARK_CAPTURE(BM_Step, lr_lie, Family::kLr, Method::kLieRk4)->DenseRange(3, 6);
BENCHMARK_CAPTURE(BM_Step, coupled_lie, Family::kCoupled, Method::kLieRk4)->DenseRange(3, 6);
BENCHMARK_CAPTURE(BM_Step, rubber_chaplygin_projected, Family::kRubberChaplygin, Method::kRk4Projected)
    ->DenseRange(3, 6);

void BM_Integrate1000(benchmark::State& state) {
  const Case c = lrflow::testing::lr_case(static_cast<int>(state.range(0)), 5);
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.steps = 1000;
  cfg.method = Method::kLieRk4;
  for (auto _ : state) benchmark::DoNotOptimize(integrate(*c.system, c.initial, cfg));
}
BENCHMARK(BM_Integrate1000)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

// The packaged benchmark_main archive carries LTO bytecode from another compiler build.
BENCHMARK_MAIN();
