#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "pdagcount/distributions.hpp"
#include "pdagcount/regression.hpp"

using namespace pdagcount;

namespace {

std::vector<Count> poisson_sample(std::size_t n, double lambda, std::uint64_t seed) {
  Rng rng(seed);
  std::poisson_distribution<Count> d(lambda);
  std::vector<Count> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

std::vector<Count> overdispersed_sample(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::gamma_distribution<double> g(2.0, 2.0);
  std::vector<Count> x(n);
  for (auto& v : x) v = std::poisson_distribution<Count>(g(rng))(rng);
  return x;
}

std::vector<Count> two_bumps(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution pick(0.4);
  std::vector<Count> x(n);
  for (auto& v : x) v = std::poisson_distribution<Count>(pick(rng) ? 0.5 : 7.0)(rng);
  return x;
}

// Intercept plus two standard normal columns. The response is Poisson, or
// gamma-Poisson with the given size when overdispersed.
std::pair<DesignMatrix, std::vector<Count>> regression_problem(std::size_t n, std::uint64_t seed, double size = 0.0) {
  Rng rng(seed);
  std::normal_distribution<double> z;
  DesignMatrix d;
  d.values.resize(static_cast<Eigen::Index>(n), 3);
  d.tags = {{ColumnSource::Intercept, -1}, {ColumnSource::Covariate, 0}, {ColumnSource::Covariate, 1}};
  std::vector<Count> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    d.values(r, 0) = 1.0;
    d.values(r, 1) = z(rng);
    d.values(r, 2) = z(rng);
    double mu = std::exp(0.5 + 0.3 * d.values(r, 1) - 0.2 * d.values(r, 2));
    if (size > 0.0) mu = std::gamma_distribution<double>(size, mu / size)(rng);
    y[i] = std::poisson_distribution<Count>(mu)(rng);
  }
  return {d, y};
}

}  // namespace

static void BM_FitPoisson(benchmark::State& state) {
  const auto x = poisson_sample(static_cast<std::size_t>(state.range(0)), 3.0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fit_poisson(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitPoisson)->Arg(1000)->Arg(10000);

static void BM_FitNegBin(benchmark::State& state) {
  const auto x = overdispersed_sample(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(fit_negbin(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitNegBin)->Arg(1000)->Arg(10000);

static void BM_FitBinomial(benchmark::State& state) {
  const auto x = poisson_sample(static_cast<std::size_t>(state.range(0)), 3.0, 3);
  for (auto _ : state) benchmark::DoNotOptimize(fit_binomial(x));
}
BENCHMARK(BM_FitBinomial)->Arg(1000)->Arg(10000);

static void BM_FitPoissonMixture(benchmark::State& state) {
  const auto x = two_bumps(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(fit_mixture(x, BaseFamily::Poisson, 2));
}
BENCHMARK(BM_FitPoissonMixture)->Arg(1000)->Arg(10000);

static void BM_FitGlm(benchmark::State& state) {
  const auto family = static_cast<GlmFamily>(state.range(1));
  const auto [x, y] = regression_problem(static_cast<std::size_t>(state.range(0)), 5,
                                         family == GlmFamily::NegBinLog ? 2.0 : 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(fit_glm(y, x, family));
}
BENCHMARK(BM_FitGlm)
    ->Args({2000, static_cast<int>(GlmFamily::PoissonLog)})
    ->Args({2000, static_cast<int>(GlmFamily::NegBinLog)});
