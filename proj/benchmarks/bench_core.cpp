#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cks/characterize.hpp"
#include "cks/genfun.hpp"
#include "cks/weights.hpp"

namespace {

using namespace cks;

void BM_BellSeries(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const int n_max = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(make_bell(k, n_max));
  state.SetComplexityN(n_max);
}
BENCHMARK(BM_BellSeries)->Args({2, 400})->Args({2, 2000})->Args({4, 400})->Complexity();

void BM_EgfEval(benchmark::State& state) {
  const WeightSequence ws = make_factorial_power(0.5, 2000);
  const GenFunEval gf(ws, EgfMode::alpha);
  const double r = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gf.eval(r));
}
BENCHMARK(BM_EgfEval)->Arg(1)->Arg(10)->Arg(30);

void BM_InfRatio(benchmark::State& state) {
  const WeightSequence ws = make_bell(2, 2000);
  const GenFunEval gf(ws, EgfMode::one_over_alpha);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(inf_ratio(gf, n));
}
BENCHMARK(BM_InfRatio)->Arg(10)->Arg(100)->Arg(300);

// Streamed window path for small r, Euler-Maclaurin once the peak is too wide.
void BM_KsEnvelopes(benchmark::State& state) {
  const double beta = state.range(0) / 10.0;
  const double r = static_cast<double>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(ks_envelopes(beta, r));
}
BENCHMARK(BM_KsEnvelopes)->Args({1, 1})->Args({5, 100})->Args({9, 1})->Args({9, 100});

void BM_PolarizedExtraction(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SpaceModel model = SpaceModel::default_model(3);
  std::mt19937_64 rng(5);
  const ChaosExpansion phi = random_sparse_expansion(model, 4, 8, rng);
  std::vector<CPoint> xis;
  for (int i = 0; i < n; ++i) xis.push_back(random_point(3, rng));
  for (auto _ : state) benchmark::DoNotOptimize(polarized_coefficient(phi, xis, phi.max_degree() + 2));
}
BENCHMARK(BM_PolarizedExtraction)->DenseRange(1, 4);

void BM_VerifyGrowth(benchmark::State& state) {
  const SpaceModel model = SpaceModel::default_model(3);
  std::mt19937_64 rng(11);
  const ChaosExpansion phi = random_sparse_expansion(model, 3, 5, rng);
  const WeightSequence ws = make_constant();
  const RigorousBound bound = rigorous_K_test(phi, 1.0, 1, ws);
  for (auto _ : state) benchmark::DoNotOptimize(verify_growth(phi, bound.spec, ws));
}
BENCHMARK(BM_VerifyGrowth)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
