#include <doctest.h>

#include <cmath>

#include "pdagcount/scoring.hpp"
#include "support.hpp"
#include "test_models.hpp"

using namespace pdagcount;

namespace {

CountDataset independent_poisson_data(std::size_t n, std::size_t k, std::uint64_t seed) {
  support::Rng rng(seed);
  std::vector<std::vector<Count>> cols;
  for (std::size_t j = 0; j < k; ++j) cols.push_back(support::poisson_draws(n, 1.5 + static_cast<double>(j), rng));
  return support::dataset(std::move(cols));
}

}  // namespace

TEST_CASE("menu parsing") {
  const FamilyMenu d = FamilyMenu::parse("default");
  CHECK(d.id() == FamilyMenu{}.id());
  const FamilyMenu p = FamilyMenu::parse("poisson,negbin");
  CHECK(p.poisson);
  CHECK(p.negbin);
  CHECK_FALSE(p.binomial);
  CHECK(p.mixture_families.empty());
  CHECK(p.id() != d.id());
  CHECK(FamilyMenu::parse("nonparametric").nonparametric);
  CHECK(support::error_of([] { FamilyMenu::parse("poisson,bogus"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("cache statistics") {
  ScoreCache cache;
  CacheStats s = cache_stats(cache);
  CHECK(s.hits == 0);
  CHECK(s.misses == 0);
  CHECK(s.hit_rate == 0.0);

  const CountDataset d = independent_poisson_data(200, 2, 1);
  const auto a = score_factor(d, {0}, {}, {}, FamilyMenu{}, cache);
  const std::uint64_t fits = cache_stats(cache).fits_performed;
  const auto b = score_factor(d, {0}, {}, {}, FamilyMenu{}, cache);
  s = cache_stats(cache);
  CHECK(a.get() == b.get());
  CHECK(s.fits_performed == fits);
  CHECK(s.hits >= 1);

  ScoreCache fresh;
  FactorKey key{{0}, {}, {}, false, 1, "m"};
  CHECK_FALSE(fresh.lookup(key).has_value());
  fresh.insert(key, a);
  CHECK(fresh.lookup(key).has_value());
  s = fresh.stats();
  CHECK(s.hits == 1);
  CHECK(s.misses == 1);
  CHECK(s.hit_rate == 0.5);
}

TEST_CASE("a poisson source selects poisson") {
  int selected = 0;
  for (int seed = 0; seed < 20; ++seed) {
    support::Rng rng(static_cast<std::uint64_t>(seed) + 1000);
    const CountDataset d = support::dataset({support::poisson_draws(2000, 3.0, rng)});
    ScoreCache cache;
    selected += score_factor(d, {0}, {}, {}, FamilyMenu{}, cache)->family == "poisson";
  }
  CHECK(selected >= 18);
}

TEST_CASE("factor score does not depend on the rest of the graph") {
  const CountDataset d = independent_poisson_data(500, 4, 3);
  ScoreCache c1(false), c2(false);
  Pdag g1(4), g2(4);
  g1.add_directed(0, 1);
  g2.add_directed(0, 1);
  g2.add_undirected(2, 3);
  const GraphScore s1 = score_graph(d, g1, {}, FamilyMenu{}, c1);
  const GraphScore s2 = score_graph(d, g2, {}, FamilyMenu{}, c2);
  CHECK(s1.model.factors[1]->bic == s2.model.factors[1]->bic);
  CHECK(s1.model.factors[1]->family == s2.model.factors[1]->family);
}

TEST_CASE("graph score is additive and relabeling invariant") {
  const CountDataset d = independent_poisson_data(400, 3, 5);
  Pdag g(3);
  g.add_directed(0, 1);
  g.add_undirected(1, 2);
  ScoreCache cache;
  const GraphScore s = score_graph(d, g, {}, FamilyMenu{}, cache);
  double sum = 0.0;
  for (const auto& f : s.model.factors) {
    ScoreCache cold(false);
    sum += score_factor(d, f->component, f->parents, {}, FamilyMenu{}, cold)->bic;
  }
  CHECK(std::abs(s.total_bic - sum) < 1e-9);

  // Swap vertices 0 and 2 in both the data and the graph.
  const CountDataset swapped = support::dataset({d.column(2), d.column(1), d.column(0)});
  Pdag h(3);
  h.add_directed(2, 1);
  h.add_undirected(1, 0);
  ScoreCache c2;
  CHECK(std::abs(score_graph(swapped, h, {}, FamilyMenu{}, c2).total_bic - s.total_bic) < 1e-8);
}

TEST_CASE("independent data prefer the empty graph") {
  int wins = 0;
  for (int seed = 0; seed < 50; ++seed) {
    const CountDataset d = independent_poisson_data(2000, 2, 200 + static_cast<std::uint64_t>(seed));
    ScoreCache cache;
    Pdag edge(2);
    edge.add_directed(0, 1);
    wins += score_graph(d, Pdag(2), {}, FamilyMenu{}, cache).total_bic > score_graph(d, edge, {}, FamilyMenu{}, cache).total_bic;
  }
  CHECK(wins >= 45);
}

TEST_CASE("nonparametric factor") {
  const CountDataset same = support::dataset({{3, 3, 3, 3}});
  const FittedFactor a = score_factor_nonparametric(same, {0}, {});
  CHECK(a.loglik == 0.0);
  CHECK(a.n_params == 0);

  const CountDataset small = support::dataset({{0, 0, 1}});
  const FittedFactor b = score_factor_nonparametric(small, {0}, {});
  CHECK(b.loglik == doctest::Approx(2.0 * std::log(2.0 / 3.0) + std::log(1.0 / 3.0)).epsilon(1e-14));

  // Two parents with 6 observed configurations, child support of size 4.
  const CountDataset six = support::dataset({{0, 0, 1, 1, 2, 2, 0, 1}, {0, 1, 0, 1, 0, 1, 0, 1}, {0, 1, 2, 3, 0, 1, 2, 3}});
  const FittedFactor c = score_factor_nonparametric(six, {2}, {0, 1});
  CHECK(c.n_params == 18);

  // Frequency tables dominate parametric families without parents.
  const CountDataset d = independent_poisson_data(300, 1, 8);
  ScoreCache cache;
  CHECK(score_factor_nonparametric(d, {0}, {}).loglik >= score_factor(d, {0}, {}, {}, FamilyMenu{}, cache)->loglik);
}

TEST_CASE("irrelevant covariate is discarded and a relevant one kept") {
  int discarded = 0, kept = 0;
  for (int seed = 0; seed < 20; ++seed) {
    support::Rng rng(static_cast<std::uint64_t>(seed) + 3000);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> noise(2000), signal(2000);
    std::vector<Count> y(2000), w(2000);
    for (std::size_t i = 0; i < 2000; ++i) {
      noise[i] = z(rng);
      signal[i] = z(rng);
      y[i] = std::poisson_distribution<Count>(2.0)(rng);
      w[i] = std::poisson_distribution<Count>(std::exp(0.5 + 0.4 * signal[i]))(rng);
    }
    const CountDataset d = support::dataset({y, w}, {noise, signal});
    ScoreCache cache;
    discarded += score_factor(d, {0}, {}, {0, 1}, FamilyMenu{}, cache)->covariates.empty();
    const auto f = score_factor(d, {1}, {}, {0, 1}, FamilyMenu{}, cache);
    kept += f->covariates == std::vector<int>{1};
  }
  CHECK(discarded >= 18);
  CHECK(kept >= 18);
}

TEST_CASE("multi-vertex components use the multivariate menu") {
  const CountDataset d = sample(models::shock_then_child(), 3000, {}, 21);
  ScoreCache cache;
  const auto src = score_factor(d, {0, 1}, {}, {}, FamilyMenu{}, cache);
  CHECK(src->family == "mv-poisson");
  const auto child = score_factor(d, {0, 1}, {2}, {}, FamilyMenu{}, cache);
  CHECK((child->family == "multinomial-logit" || child->family == "independent-glm"));
}
