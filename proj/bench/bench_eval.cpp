// Serial reference vs OpenMP kernels of the evaluation harness, on the
// bundled fixtures replicated to a larger corpus.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "pitch/eval.hpp"
#include "pitch/records.hpp"

namespace {

using namespace pitch;

const std::vector<ScoreRecord>& scores() {
  static const auto records = [] {
    const auto base = load_score_records(std::string(PITCH_FIXTURE_DIR) + "/scores.jsonl");
    std::vector<ScoreRecord> out;
    for (int copy = 0; copy < 8; ++copy) {
      for (auto r : base) {
        r.sample_id += "-" + std::to_string(copy);
        out.push_back(std::move(r));
      }
    }
    return out;
  }();
  return records;
}

const std::vector<DecisionRecord>& decisions() {
  static const auto records = load_decision_records(std::string(PITCH_FIXTURE_DIR) + "/decisions.jsonl");
  return records;
}

std::vector<double> grid() {
  std::vector<double> g;
  for (int k = 1; k <= 30; ++k) g.push_back(k / 10.0);
  return g;
}

void BM_DegradationSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(eval::serial::degradation_scores(scores()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scores().size()));
}
void BM_DegradationParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(eval::degradation_scores(scores()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scores().size()));
}

void BM_EvaluateSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(eval::serial::evaluate_scores(scores(), {}));
}
void BM_EvaluateParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(eval::evaluate_scores(scores(), {}));
}

void BM_SweepSerial(benchmark::State& state) {
  const auto g = grid();
  for (auto _ : state) benchmark::DoNotOptimize(eval::serial::temperature_sweep(decisions(), g, {}));
}
void BM_SweepParallel(benchmark::State& state) {
  const auto g = grid();
  for (auto _ : state) benchmark::DoNotOptimize(eval::temperature_sweep(decisions(), g, {}));
}

}  // namespace

BENCHMARK(BM_DegradationSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DegradationParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
