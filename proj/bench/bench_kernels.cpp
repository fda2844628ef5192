// Serial reference against the OpenMP kernels. Run with
// OMP_NUM_THREADS=<n> to vary the parallel width.

#include <benchmark/benchmark.h>

#include "harq/ack_model.hpp"
#include "harq/baselines.hpp"
#include "harq/sdo_optimizer.hpp"
#include "harq/simulator.hpp"

namespace {

using harq::Exec;

const harq::AckModel& model() {
  static const auto m = harq::AckModel::gaussian_tbcc(64);
  return m;
}

harq::SdoConfig config() {
  harq::SdoConfig c;
  c.beta = 10;
  return c;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_PLambda(benchmark::State& state) {
  auto cfg = config();
  cfg.n1_step = 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(harq::p_lambda(70.0, cfg, model(), exec_of(state)));
}

void BM_Solve(benchmark::State& state) {
  const auto cfg = config();
  for (auto _ : state) benchmark::DoNotOptimize(harq::solve(cfg, model(), exec_of(state)));
}

void BM_RhoN1Curve(benchmark::State& state) {
  const auto cfg = config();
  for (auto _ : state) benchmark::DoNotOptimize(harq::rho_n1_curve(cfg, model(), exec_of(state)));
}

void BM_IirAoi(benchmark::State& state) {
  const int cap = harq::iir_cap(model());
  for (auto _ : state) benchmark::DoNotOptimize(harq::iir_aoi(64, 10, model(), cap, exec_of(state)));
}

void BM_Simulate(benchmark::State& state) {
  const auto dist = harq::build_dist(harq::solve(config(), model()).schedule, model());
  harq::SimConfig cfg;
  cfg.epochs = 1'000'000;
  for (auto _ : state) benchmark::DoNotOptimize(harq::simulate(cfg, dist, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_PLambda)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Solve)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RhoN1Curve)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IirAoi)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Simulate)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
