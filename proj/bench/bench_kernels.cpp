// Serial against parallel execution of the main kernels on the default
// simulated dataset. Arg 0 is Exec::Serial, arg 1 Exec::Parallel.

#include <benchmark/benchmark.h>

#include "detcal/bootstrap.hpp"
#include "detcal/calibration.hpp"
#include "detcal/ensembling.hpp"
#include "detcal/matching.hpp"
#include "detcal/simulator.hpp"

namespace {

using namespace detcal;

struct Fixture {
  sim::SimDataset data = sim::simulate_dataset(sim::SimConfig{});
  GroundTruth gt = ground_truth(data.consensus);
  std::vector<DetectionSet> sets = data.test_sets();
  DetectionSet lse20 = ensemble_predict(sets, compose_ensemble(data.leaderboard, Strategy::LSE, 20));
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void BM_Evaluate(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(f.lse20.detections, f.gt, {}, exec_of(state)).map);
}

void BM_BuildProfile(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_profile(f.lse20.detections, f.gt, {}, exec_of(state)).n_det);
  }
}

void BM_EnsemblePredict(benchmark::State& state) {
  const auto& f = fixture();
  const auto spec = compose_ensemble(f.data.leaderboard, Strategy::RSE, 20);
  for (auto _ : state) benchmark::DoNotOptimize(ensemble_predict(f.sets, spec, exec_of(state)).detections.size());
}

void BM_BootstrapDece(benchmark::State& state) {
  const auto& f = fixture();
  const auto all = make_eval_dataset(f.lse20.detections, f.gt);
  const CalibrationEvaluator ev(all, {}, Exec::Serial);
  const MetricFn metric = [&](std::span<const std::size_t> sel) { return d_ece(ev.profile(sel)); };
  for (auto _ : state) {
    benchmark::DoNotOptimize(bootstrap_metric("dece", all.size(), metric, {200, 1, 0.95}, exec_of(state)).mean);
  }
}

void BM_SimulateDataset(benchmark::State& state) {
  const sim::SimConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(sim::simulate_dataset(cfg, exec_of(state)).models.size());
}

BENCHMARK(BM_Evaluate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildProfile)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsemblePredict)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BootstrapDece)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateDataset)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
