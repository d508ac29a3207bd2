#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include <behavsteg/metrics.hpp>

namespace {

using namespace behavsteg;

void BM_PermutationEntropy(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  std::vector<double> x(10000);
  for (auto& v : x) v = n(rng);
  const PeParams params{static_cast<int>(state.range(0)), 1};
  for (auto _ : state) benchmark::DoNotOptimize(permutation_entropy(x, params));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_PermutationEntropy)->Arg(3)->Arg(5)->Arg(7);

void BM_JsDivergence(benchmark::State& state) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> a(64);
  std::vector<double> b(64);
  for (auto& v : a) v = u(rng);
  for (auto& v : b) v = u(rng);
  const auto p = Histogram(a).normalized();
  const auto q = Histogram(b).normalized();
  for (auto _ : state) benchmark::DoNotOptimize(js_divergence(p, q));
}
BENCHMARK(BM_JsDivergence);

}  // namespace
