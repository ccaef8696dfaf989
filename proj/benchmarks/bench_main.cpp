#include <benchmark/benchmark.h>

#include "ddsc/ddsc.hpp"
#include "ddsc/sparse_solver.hpp"

using namespace ddsc;

namespace {

// One week of hourly data, M houses.
Matrix usage(Eigen::Index M, std::uint64_t seed) {
  CounterRng rng(seed, stream_id("bench"));
  Matrix X(168, M);
  for (Eigen::Index j = 0; j < M; ++j) {
    for (Eigen::Index t = 0; t < 168; ++t) X(t, j) = rng.uniform();
  }
  return X;
}

void BM_SolveActivations(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  CounterRng rng(1, 1);
  const Matrix X = usage(28, 2);
  const Dictionary B = random_dictionary(168, n, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_activations(X, B, ActivationParams{0.1, PenaltyMode::L1, 1000, 1e-6}));
  }
}
BENCHMARK(BM_SolveActivations)->Arg(16)->Arg(64);

void BM_UpdateDictionary(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  CounterRng rng(1, 1);
  const Matrix X = usage(28, 3);
  const Dictionary B = random_dictionary(168, n, rng);
  const auto A = solve_activations(X, B, ActivationParams{0.1, PenaltyMode::L1, 1000, 1e-6}).activations;
  for (auto _ : state) {
    benchmark::DoNotOptimize(update_dictionary(X, A, B, 50, 1e-6, rng));
  }
}
BENCHMARK(BM_UpdateDictionary)->Arg(16)->Arg(64);

void BM_DisaggregationStep(benchmark::State& state) {
  CounterRng rng(2, 2);
  const Matrix X = usage(28, 4);
  std::vector<Dictionary> bases;
  for (int k = 0; k < 5; ++k) bases.push_back(random_dictionary(168, 16, rng));
  TrainConfig c;
  c.n_bases = 16;
  for (auto _ : state) {
    const auto blocks = disaggregation_solve(X, bases, c);
    for (std::size_t k = 0; k < bases.size(); ++k) {
      benchmark::DoNotOptimize(perceptron_step(X, bases[k].values(), blocks[k].values(), blocks[k].values(), 1e-4));
    }
  }
}
BENCHMARK(BM_DisaggregationStep);

}  // namespace
BENCHMARK_MAIN();
