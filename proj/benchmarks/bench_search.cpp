#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "pdagcount/scoring.hpp"
#include "pdagcount/search.hpp"

using namespace pdagcount;

namespace {

// Six variables: 0 -> 1 -> 2, a shared shock between 3 and 4, 5 independent.
CountDataset six_variables(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<Count>> cols(6, std::vector<Count>(n));
  for (std::size_t i = 0; i < n; ++i) {
    cols[0][i] = std::poisson_distribution<Count>(2.0)(rng);
    cols[1][i] = std::poisson_distribution<Count>(std::exp(0.2 + 0.25 * static_cast<double>(cols[0][i])))(rng);
    cols[2][i] = std::poisson_distribution<Count>(std::exp(0.3 + 0.1 * static_cast<double>(cols[1][i])))(rng);
    const Count shock = std::poisson_distribution<Count>(1.0)(rng);
    cols[3][i] = shock + std::poisson_distribution<Count>(1.0)(rng);
    cols[4][i] = shock + std::poisson_distribution<Count>(1.5)(rng);
    cols[5][i] = std::poisson_distribution<Count>(1.2)(rng);
  }
  std::vector<std::string> names;
  for (int j = 0; j < 6; ++j) names.push_back("v" + std::to_string(j));
  return CountDataset(std::move(names), std::move(cols));
}

}  // namespace

// Hill climbing from the empty graph with a fresh cache per run; range(1)
// switches the cache on or off.
static void BM_HillClimb(benchmark::State& state) {
  const CountDataset d = six_variables(static_cast<std::size_t>(state.range(0)), 17);
  const bool cached = state.range(1) != 0;
  std::uint64_t fits = 0;
  for (auto _ : state) {
    ScoreCache cache(cached);
    const SearchTrace t = hill_climb(Scorer(d, {}, FamilyMenu{}, cache), Pdag(6), SearchConfig{});
    fits = t.cache.fits_performed;
    benchmark::DoNotOptimize(t.final_score);
  }
  state.counters["fits"] = static_cast<double>(fits);
  state.SetLabel(cached ? "cache on" : "cache off");
}
BENCHMARK(BM_HillClimb)->Args({500, 1})->Args({500, 0})->Unit(benchmark::kMillisecond);

static void BM_Neighborhood(benchmark::State& state) {
  const Pdag g = init_random(static_cast<int>(state.range(0)), 0.3, 5);
  for (auto _ : state) benchmark::DoNotOptimize(neighborhood(g));
}
BENCHMARK(BM_Neighborhood)->Arg(6)->Arg(12)->Arg(24);

static void BM_MoralGraph(benchmark::State& state) {
  const CountDataset d = six_variables(2000, 3);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_moral_graph(d, 0.05, 1, 199));
}
BENCHMARK(BM_MoralGraph)->Unit(benchmark::kMillisecond);
