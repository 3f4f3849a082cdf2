#include <benchmark/benchmark.h>

#include <random>

#include "trustcal/event_log.hpp"
#include "trustcal/experiment.hpp"
#include "trustcal/fit.hpp"

using namespace trustcal;

namespace {

std::vector<trust::TrustObservation> trajectory(int n) {
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.6);
  std::vector<trust::TrustObservation> out;
  for (int i = 1; i <= n; ++i) {
    out.push_back({i, coin(rng) ? trust::Outcome::Success : trust::Outcome::Failure, std::nullopt,
                   coin(rng) ? TrustAction::Integrate : TrustAction::Discard});
  }
  return out;
}

void BM_Fit(benchmark::State& state) {
  const auto traj = trajectory(static_cast<int>(state.range(0)));
  trust::FitConfig config;
  config.grid_points = 12;
  config.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(trust::fit(traj, config));
}
BENCHMARK(BM_Fit)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_PredictTrajectory(benchmark::State& state) {
  const auto traj = trajectory(static_cast<int>(state.range(0)));
  const trust::TrustParams params;
  for (auto _ : state) benchmark::DoNotOptimize(trust::predict_trajectory(traj, params));
}
BENCHMARK(BM_PredictTrajectory)->Arg(10)->Arg(1000);

void BM_RunCondition(benchmark::State& state) {
  sim::PopulationSpec spec;
  spec.count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        experiment::run_condition(Condition::standard(ConditionId::TccPositive), spec, {}, 1));
  }
}
BENCHMARK(BM_RunCondition)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_RebuildSession(benchmark::State& state) {
  sim::PopulationSpec spec;
  spec.count = 1;
  const auto run = experiment::run_condition(Condition::standard(ConditionId::TccNegative), spec, {}, 1);
  const auto& events = run.logs.front();
  for (auto _ : state) benchmark::DoNotOptimize(service::rebuild(events));
  state.counters["events"] = static_cast<double>(events.size());
}
BENCHMARK(BM_RebuildSession)->Unit(benchmark::kMicrosecond);

void BM_ParseLog(benchmark::State& state) {
  sim::PopulationSpec spec;
  spec.count = 1;
  const auto run = experiment::run_condition(Condition::standard(ConditionId::TccNegative), spec, {}, 1);
  const std::string text = service::write_log("s", run.logs.front());
  for (auto _ : state) benchmark::DoNotOptimize(service::parse_log(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseLog)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
