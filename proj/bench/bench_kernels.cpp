// Serial reference vs batched serial vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <random>

#include "gpfusion/datasets.hpp"
#include "gpfusion/gp.hpp"
#include "gpfusion/kernels.hpp"

using namespace gpfusion;

namespace {

const ScoreDataset& data() {
  static const ScoreDataset ds = generate_synthetic(presets::graded_overlap(1, 1000, 5000));
  return ds;
}

const ColumnarDataset& columns() {
  static const ColumnarDataset c = ColumnarDataset::from(data());
  return c;
}

const std::vector<ExpressionTree>& population() {
  static const std::vector<ExpressionTree> trees = [] {
    EvolutionConfig cfg;
    cfg.population_size = 64;
    auto terminals = terminal_set(4, cfg.n_constants);
    auto rng = stream_for(1, 0);
    return ramped_half_and_half(cfg, terminals, rng);
  }();
  return trees;
}

const std::vector<std::vector<double>>& chromosomes() {
  static const std::vector<std::vector<double>> pop = [] {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> w(-10, 10);
    std::vector<std::vector<double>> out(256, std::vector<double>(4));
    for (auto& c : out)
      for (auto& x : c) x = w(rng);
    return out;
  }();
  return pop;
}

void BM_EvalReference(benchmark::State& state) {
  for (auto _ : state)
    for (const auto& t : population()) benchmark::DoNotOptimize(eval_population_reference(t, data()));
  state.SetItemsProcessed(state.iterations() * population().size() * 6000);
}

void BM_EvalBatchedSerial(benchmark::State& state) {
  for (auto _ : state)
    for (const auto& t : population())
      benchmark::DoNotOptimize(eval_population(t, columns(), Execution::Serial));
  state.SetItemsProcessed(state.iterations() * population().size() * 6000);
}

void BM_EvalBatchedParallel(benchmark::State& state) {
  for (auto _ : state)
    for (const auto& t : population())
      benchmark::DoNotOptimize(eval_population(t, columns(), Execution::Parallel));
  state.SetItemsProcessed(state.iterations() * population().size() * 6000);
}

void BM_PopulationFitnessSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(population_fitness_serial(population(), columns()));
  state.SetItemsProcessed(state.iterations() * population().size());
}

void BM_PopulationFitnessParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(population_fitness_parallel(population(), columns()));
  state.SetItemsProcessed(state.iterations() * population().size());
}

void BM_WeightedFitnessSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(weighted_fitness_serial(chromosomes(), columns()));
  state.SetItemsProcessed(state.iterations() * chromosomes().size());
}

void BM_WeightedFitnessParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(weighted_fitness_parallel(chromosomes(), columns()));
  state.SetItemsProcessed(state.iterations() * chromosomes().size());
}

}  // namespace

BENCHMARK(BM_EvalReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvalBatchedSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvalBatchedParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PopulationFitnessSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PopulationFitnessParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WeightedFitnessSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WeightedFitnessParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
