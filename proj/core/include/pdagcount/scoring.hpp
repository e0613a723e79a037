#pragma once

#include <atomic>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdagcount/dataset.hpp"
#include "pdagcount/model.hpp"
#include "pdagcount/pdag.hpp"

namespace pdagcount {

// Candidate families for factor selection.
struct FamilyMenu {
  bool poisson = true;
  bool binomial = true;
  bool negbin = true;
  std::vector<BaseFamily> mixture_families{BaseFamily::Poisson};
  std::vector<int> mixture_orders{2, 3};
  bool multinomial_split = true;
  bool mv_poisson = true;
  bool independent = true;
  // Conditional frequency tables instead of parametric families.
  bool nonparametric = false;
  ParentEncoding encoding = ParentEncoding::Identity;

  // Canonical text form; equal menus give equal ids.
  std::string id() const;
  std::vector<GlmFamily> glm_families() const;

  // Comma-separated tokens: poisson, binomial, negbin, mix-poisson,
  // mix-binomial, mix-negbin, mix-orders=2:3, multinomial-split, mv-poisson,
  // independent, nonparametric, encoding=log1p, or "default".
  static FamilyMenu parse(std::string_view text);
  static FamilyMenu nonparametric_menu();
};

struct FactorKey {
  std::vector<int> component;
  std::vector<int> parents;
  std::vector<int> covariates;
  // True when `covariates` is the pool searched by forward selection,
  // false when it is the fixed set of regressors.
  bool selection = false;
  std::uint64_t data_fingerprint = 0;
  std::string menu_id;

  friend auto operator<=>(const FactorKey&, const FactorKey&) = default;
};

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t fits_performed = 0;
  double hit_rate = 0.0;
};

// Factor-level memo. Reads are shared, insertions exclusive; a racing miss
// may fit twice but both writers store identical values.
class ScoreCache {
 public:
  explicit ScoreCache(bool enabled = true) : enabled_(enabled) {}
  ScoreCache(const ScoreCache&) = delete;
  ScoreCache& operator=(const ScoreCache&) = delete;

  bool enabled() const noexcept { return enabled_; }
  // nullopt on a miss; a cached null pointer records "no admissible family".
  std::optional<std::shared_ptr<const FittedFactor>> lookup(const FactorKey& key);
  void insert(const FactorKey& key, std::shared_ptr<const FittedFactor> value);
  void record_fit() noexcept { fits_.fetch_add(1, std::memory_order_relaxed); }
  CacheStats stats() const;
  std::size_t size() const;

 private:
  bool enabled_;
  mutable std::shared_mutex mutex_;
  std::map<FactorKey, std::shared_ptr<const FittedFactor>> entries_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
  std::atomic<std::uint64_t> fits_{0};
};

CacheStats cache_stats(const ScoreCache& cache);

// Fits every admissible family of `menu`, with greedy forward covariate
// selection from `covariate_pool`, and returns the highest-BIC factor.
std::shared_ptr<const FittedFactor> score_factor(const CountDataset& data, std::vector<int> component,
                                                 std::vector<int> parents, std::vector<int> covariate_pool,
                                                 const FamilyMenu& menu, ScoreCache& cache);

// Conditional frequency table over the observed support.
FittedFactor score_factor_nonparametric(const CountDataset& data, std::vector<int> component,
                                        std::vector<int> parents);

struct GraphScore {
  double total_bic = 0.0;
  PdagModel model;
};

GraphScore score_graph(const CountDataset& data, const Pdag& g, std::span<const int> covariate_pool,
                       const FamilyMenu& menu, ScoreCache& cache);

// Data, covariate pool, menu and cache bundled for the search routines.
class Scorer {
 public:
  Scorer(const CountDataset& data, std::vector<int> covariate_pool, FamilyMenu menu, ScoreCache& cache)
      : data_(data), pool_(std::move(covariate_pool)), menu_(std::move(menu)), cache_(cache) {}

  // Total BIC, or -inf when some component has no admissible family.
  double score(const Pdag& g) const;
  GraphScore evaluate(const Pdag& g) const;

  const CountDataset& data() const noexcept { return data_; }
  const FamilyMenu& menu() const noexcept { return menu_; }
  const std::vector<int>& covariate_pool() const noexcept { return pool_; }
  ScoreCache& cache() const noexcept { return cache_; }

 private:
  const CountDataset& data_;
  std::vector<int> pool_;
  FamilyMenu menu_;
  ScoreCache& cache_;
};

}  // namespace pdagcount
