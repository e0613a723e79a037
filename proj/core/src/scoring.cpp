#include "pdagcount/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>

#include "pdagcount/error.hpp"
#include "pdagcount/math.hpp"

namespace pdagcount {
namespace {

using FactorPtr = std::shared_ptr<const FittedFactor>;

bool skippable(const Error& e) { return is_skip_error(e.code()) || e.code() == ErrorCode::NoAdmissibleFamily; }

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

FittedFactor base_factor(const std::vector<int>& comp, const std::vector<int>& parents,
                         const std::vector<int>& covs, const FamilyMenu& menu) {
  FittedFactor f;
  f.component = comp;
  f.parents = parents;
  f.covariates = covs;
  f.encoding = menu.encoding;
  return f;
}

void set_scores(FittedFactor& f, double loglik, int n_params, std::size_t n_obs) {
  f.loglik = loglik;
  f.n_params = n_params;
  f.n_obs = n_obs;
  f.bic = bic(loglik, n_params, n_obs);
}

FittedFactor fit_univariate_marginal(const CountDataset& data, int v, const FamilyMenu& menu) {
  const auto& y = data.column(static_cast<std::size_t>(v));
  std::optional<FitResult> best;
  auto consider = [&](auto&& fitter) {
    try {
      FitResult r = fitter();
      if (!best || r.bic > best->bic) best = std::move(r);
    } catch (const Error& e) {
      if (!skippable(e)) throw;
    }
  };
  if (menu.poisson) consider([&] { return fit_poisson(y); });
  if (menu.binomial) consider([&] { return fit_binomial(y); });
  if (menu.negbin) consider([&] { return fit_negbin(y); });
  for (BaseFamily fam : menu.mixture_families)
    for (int m : menu.mixture_orders) consider([&] { return fit_mixture(y, fam, m); });
  if (!best) fail(ErrorCode::NoAdmissibleFamily, "no univariate family fits vertex " + std::to_string(v));

  FittedFactor f = base_factor({v}, {}, {}, menu);
  f.family = family_name(best->params);
  set_scores(f, best->loglik, best->n_params, best->n_obs);
  f.model = std::move(*best);
  return f;
}

class FactorFitter {
 public:
  FactorFitter(const CountDataset& data, const FamilyMenu& menu, ScoreCache& cache)
      : data_(data), menu_(menu), menu_id_(menu.id()), cache_(cache) {}

  // Fit with a fixed regressor set; cached, including "no admissible family".
  FactorPtr fixed(const std::vector<int>& comp, const std::vector<int>& parents, const std::vector<int>& covs) {
    FactorKey key{comp, parents, covs, false, data_.fingerprint(), menu_id_};
    if (cache_.enabled()) {
      if (auto hit = cache_.lookup(key)) {
        if (!*hit) fail(ErrorCode::NoAdmissibleFamily, "cached: no admissible family");
        return *hit;
      }
    } else {
      cache_.lookup(key);
    }
    cache_.record_fit();
    FactorPtr result;
    try {
      result = std::make_shared<const FittedFactor>(compute(comp, parents, covs));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoAdmissibleFamily) cache_.insert(key, nullptr);
      throw;
    }
    cache_.insert(key, result);
    return result;
  }

 private:
  FittedFactor compute(const std::vector<int>& comp, const std::vector<int>& parents,
                       const std::vector<int>& covs) {
    const bool regression = !parents.empty() || !covs.empty();
    if (comp.size() == 1) {
      if (!regression) return fit_univariate_marginal(data_, comp.front(), menu_);
      return fit_single_glm(comp.front(), parents, covs);
    }
    return regression ? fit_multivariate_regression(comp, parents, covs) : fit_multivariate_marginal(comp);
  }

  FittedFactor fit_single_glm(int v, const std::vector<int>& parents, const std::vector<int>& covs) {
    const auto families = menu_.glm_families();
    if (families.empty()) fail(ErrorCode::NoAdmissibleFamily, "menu has no regression family");
    const DesignMatrix x = make_design(data_, parents, covs, menu_.encoding);
    GlmFit fit;
    try {
      fit = fit_best_glm(data_.column(static_cast<std::size_t>(v)), x, families);
    } catch (const Error& e) {
      if (!skippable(e)) throw;
      fail(ErrorCode::NoAdmissibleFamily, std::string("no GLM fits: ") + e.what());
    }
    FittedFactor f = base_factor({v}, parents, covs, menu_);
    f.family = "glm-" + family_name(fit.family);
    set_scores(f, fit.loglik, fit.n_params, fit.n_obs);
    f.model = std::move(fit);
    return f;
  }

  FittedFactor fit_multivariate_marginal(const std::vector<int>& comp) {
    const CountMatrix rows = gather_rows(data_, comp);
    std::optional<FittedFactor> best;
    auto offer = [&](FittedFactor f) {
      if (!best || f.bic > best->bic) best = std::move(f);
    };
    auto from_fit = [&](FitResult fit) {
      FittedFactor f = base_factor(comp, {}, {}, menu_);
      f.family = family_name(fit.params);
      set_scores(f, fit.loglik, fit.n_params, fit.n_obs);
      f.model = std::move(fit);
      return f;
    };
    if (menu_.multinomial_split) {
      try {
        offer(from_fit(fit_multinomial_split(rows)));
      } catch (const Error& e) {
        if (!skippable(e)) throw;
      }
    }
    if (menu_.mv_poisson) {
      try {
        offer(from_fit(fit_mv_poisson(rows)));
      } catch (const Error& e) {
        if (!skippable(e)) throw;
      }
    }
    if (menu_.independent) {
      try {
        IndependentMarginals parts;
        double ll = 0.0;
        int k = 0;
        for (int v : comp) {
          const FactorPtr single = fixed({v}, {}, {});
          parts.per_vertex.push_back(std::get<FitResult>(single->model));
          ll += single->loglik;
          k += single->n_params;
        }
        FittedFactor f = base_factor(comp, {}, {}, menu_);
        f.family = "independent";
        set_scores(f, ll, k, data_.n_rows());
        f.model = std::move(parts);
        offer(std::move(f));
      } catch (const Error& e) {
        if (!skippable(e)) throw;
      }
    }
    if (!best) fail(ErrorCode::NoAdmissibleFamily, "no multivariate family fits the component");
    return std::move(*best);
  }

  FittedFactor fit_multivariate_regression(const std::vector<int>& comp, const std::vector<int>& parents,
                                           const std::vector<int>& covs) {
    const auto families = menu_.glm_families();
    if (families.empty()) fail(ErrorCode::NoAdmissibleFamily, "menu has no regression family");
    std::optional<FittedFactor> best;
    auto offer = [&](FittedFactor f) {
      if (!best || f.bic > best->bic) best = std::move(f);
    };
    if (menu_.multinomial_split) {
      try {
        const DesignMatrix x = make_design(data_, parents, covs, menu_.encoding);
        MultinomialLogitFit fit = fit_multinomial_logit(gather_rows(data_, comp), x, families);
        FittedFactor f = base_factor(comp, parents, covs, menu_);
        f.family = "multinomial-logit";
        set_scores(f, fit.loglik, fit.n_params, fit.n_obs);
        f.model = std::move(fit);
        offer(std::move(f));
      } catch (const Error& e) {
        if (!skippable(e)) throw;
      }
    }
    if (menu_.independent) {
      try {
        IndependentGlms parts;
        double ll = 0.0;
        int k = 0;
        for (int v : comp) {
          const FactorPtr single = fixed({v}, parents, covs);
          parts.per_vertex.push_back(std::get<GlmFit>(single->model));
          ll += single->loglik;
          k += single->n_params;
        }
        FittedFactor f = base_factor(comp, parents, covs, menu_);
        f.family = "independent-glm";
        set_scores(f, ll, k, data_.n_rows());
        f.model = std::move(parts);
        offer(std::move(f));
      } catch (const Error& e) {
        if (!skippable(e)) throw;
      }
    }
    if (!best) fail(ErrorCode::NoAdmissibleFamily, "no conditional multivariate family fits the component");
    return std::move(*best);
  }

  const CountDataset& data_;
  const FamilyMenu& menu_;
  std::string menu_id_;
  ScoreCache& cache_;
};

std::vector<int> canonical(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

void check_factor_args(const CountDataset& data, const std::vector<int>& comp, const std::vector<int>& parents,
                       const std::vector<int>& covs) {
  if (comp.empty()) fail(ErrorCode::InvalidArgument, "empty component");
  if (data.n_rows() == 0) fail(ErrorCode::EmptyData, "dataset has no rows");
  for (int v : comp)
    if (v < 0 || static_cast<std::size_t>(v) >= data.n_vars()) fail(ErrorCode::InvalidArgument, "vertex out of range");
  for (int v : parents) {
    if (v < 0 || static_cast<std::size_t>(v) >= data.n_vars()) fail(ErrorCode::InvalidArgument, "parent out of range");
    if (std::binary_search(comp.begin(), comp.end(), v))
      fail(ErrorCode::InvalidArgument, "parent inside its own component");
  }
  for (int c : covs)
    if (c < 0 || static_cast<std::size_t>(c) >= data.n_covariates())
      fail(ErrorCode::InvalidArgument, "covariate index out of range");
}

}  // namespace

std::string FamilyMenu::id() const {
  if (nonparametric) return "nonparametric";
  std::ostringstream os;
  os << (poisson ? "poisson," : "") << (binomial ? "binomial," : "") << (negbin ? "negbin," : "");
  for (BaseFamily f : mixture_families) os << "mix-" << family_name(f) << ',';
  if (!mixture_families.empty()) {
    os << "mix-orders=";
    for (std::size_t i = 0; i < mixture_orders.size(); ++i) os << (i ? ":" : "") << mixture_orders[i];
    os << ',';
  }
  os << (multinomial_split ? "multinomial-split," : "") << (mv_poisson ? "mv-poisson," : "")
     << (independent ? "independent," : "");
  os << "encoding=" << (encoding == ParentEncoding::Log1p ? "log1p" : "identity");
  return os.str();
}

std::vector<GlmFamily> FamilyMenu::glm_families() const {
  std::vector<GlmFamily> out;
  if (poisson) out.push_back(GlmFamily::PoissonLog);
  if (negbin) out.push_back(GlmFamily::NegBinLog);
  if (binomial) out.push_back(GlmFamily::BinomialLogit);
  return out;
}

FamilyMenu FamilyMenu::parse(std::string_view text) {
  if (text.empty() || text == "default") return FamilyMenu{};
  if (text == "nonparametric") return nonparametric_menu();
  FamilyMenu m;
  m.poisson = m.binomial = m.negbin = false;
  m.mixture_families.clear();
  m.multinomial_split = m.mv_poisson = m.independent = false;
  for (const std::string& tok : split(text, ',')) {
    if (tok.empty()) continue;
    if (tok == "poisson") m.poisson = true;
    else if (tok == "binomial") m.binomial = true;
    else if (tok == "negbin") m.negbin = true;
    else if (tok == "mix-poisson") m.mixture_families.push_back(BaseFamily::Poisson);
    else if (tok == "mix-binomial") m.mixture_families.push_back(BaseFamily::Binomial);
    else if (tok == "mix-negbin") m.mixture_families.push_back(BaseFamily::NegBin);
    else if (tok == "multinomial-split") m.multinomial_split = true;
    else if (tok == "mv-poisson") m.mv_poisson = true;
    else if (tok == "independent") m.independent = true;
    else if (tok == "nonparametric") m.nonparametric = true;
    else if (tok == "encoding=log1p") m.encoding = ParentEncoding::Log1p;
    else if (tok == "encoding=identity") m.encoding = ParentEncoding::Identity;
    else if (tok.rfind("mix-orders=", 0) == 0) {
      m.mixture_orders.clear();
      for (const std::string& o : split(tok.substr(11), ':')) {
        int v = 0;
        try {
          v = std::stoi(o);
        } catch (const std::exception&) {
          fail(ErrorCode::InvalidArgument, "bad mixture order '" + o + "'");
        }
        if (v < 2) fail(ErrorCode::InvalidArgument, "mixture orders must be >= 2");
        m.mixture_orders.push_back(v);
      }
    } else {
      fail(ErrorCode::InvalidArgument, "unknown menu token '" + tok + "'");
    }
  }
  std::sort(m.mixture_families.begin(), m.mixture_families.end());
  m.mixture_families.erase(std::unique(m.mixture_families.begin(), m.mixture_families.end()),
                           m.mixture_families.end());
  const bool univariate = m.poisson || m.binomial || m.negbin || !m.mixture_families.empty();
  if (!m.nonparametric && !univariate) fail(ErrorCode::InvalidArgument, "menu has no univariate family");
  return m;
}

FamilyMenu FamilyMenu::nonparametric_menu() {
  FamilyMenu m;
  m.nonparametric = true;
  return m;
}

std::optional<std::shared_ptr<const FittedFactor>> ScoreCache::lookup(const FactorKey& key) {
  if (enabled_) {
    std::shared_lock lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) {
      hits_.fetch_add(1, std::memory_order_relaxed);
      return it->second;
    }
  }
  misses_.fetch_add(1, std::memory_order_relaxed);
  return std::nullopt;
}

void ScoreCache::insert(const FactorKey& key, std::shared_ptr<const FittedFactor> value) {
  if (!enabled_) return;
  std::unique_lock lock(mutex_);
  entries_.emplace(key, std::move(value));
}

CacheStats ScoreCache::stats() const {
  CacheStats s;
  s.hits = hits_.load();
  s.misses = misses_.load();
  s.fits_performed = fits_.load();
  const auto total = s.hits + s.misses;
  s.hit_rate = total == 0 ? 0.0 : static_cast<double>(s.hits) / static_cast<double>(total);
  return s;
}

std::size_t ScoreCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

CacheStats cache_stats(const ScoreCache& cache) { return cache.stats(); }

FittedFactor score_factor_nonparametric(const CountDataset& data, std::vector<int> component,
                                        std::vector<int> parents) {
  component = canonical(std::move(component));
  parents = canonical(std::move(parents));
  check_factor_args(data, component, parents, {});
  using Cell = FrequencyTable::Cell;
  std::map<Cell, std::map<Cell, double>> counts;
  std::map<Cell, double> pooled;
  const std::size_t n = data.n_rows();
  for (std::size_t i = 0; i < n; ++i) {
    Cell cell, cfg;
    for (int v : component) cell.push_back(data.at(i, static_cast<std::size_t>(v)));
    for (int v : parents) cfg.push_back(data.at(i, static_cast<std::size_t>(v)));
    counts[cfg][cell] += 1.0;
    pooled[cell] += 1.0;
  }
  FrequencyTable table;
  double ll = 0.0;
  for (auto& [cfg, cells] : counts) {
    double total = 0.0;
    for (const auto& [cell, c] : cells) total += c;
    auto& out = table.conditional[cfg];
    for (const auto& [cell, c] : cells) {
      ll += c * std::log(c / total);
      out[cell] = c / total;
    }
  }
  for (const auto& [cell, c] : pooled) table.pooled[cell] = c / static_cast<double>(n);

  FittedFactor f;
  f.component = std::move(component);
  f.parents = std::move(parents);
  f.family = "nonparametric";
  const int n_params = static_cast<int>((pooled.size() - 1) * counts.size());
  set_scores(f, ll, n_params, n);
  f.model = std::move(table);
  return f;
}

std::shared_ptr<const FittedFactor> score_factor(const CountDataset& data, std::vector<int> component,
                                                 std::vector<int> parents, std::vector<int> covariate_pool,
                                                 const FamilyMenu& menu, ScoreCache& cache) {
  component = canonical(std::move(component));
  parents = canonical(std::move(parents));
  covariate_pool = canonical(std::move(covariate_pool));
  check_factor_args(data, component, parents, covariate_pool);
  if (menu.nonparametric) covariate_pool.clear();

  FactorKey key{component, parents, covariate_pool, true, data.fingerprint(), menu.id()};
  if (auto hit = cache.lookup(key)) {
    if (!*hit) fail(ErrorCode::NoAdmissibleFamily, "cached: no admissible family");
    return *hit;
  }

  if (menu.nonparametric) {
    cache.record_fit();
    auto result = std::make_shared<const FittedFactor>(score_factor_nonparametric(data, component, parents));
    cache.insert(key, result);
    return result;
  }

  FactorFitter fitter(data, menu, cache);
  auto attempt = [&](const std::vector<int>& covs) -> FactorPtr {
    try {
      return fitter.fixed(component, parents, covs);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoAdmissibleFamily) throw;
      return nullptr;
    }
  };

  // Greedy forward selection: add the best-improving covariate until none helps.
  std::vector<int> selected;
  FactorPtr best = attempt(selected);
  while (true) {
    FactorPtr step_best;
    int step_cov = -1;
    for (int c : covariate_pool) {
      if (std::binary_search(selected.begin(), selected.end(), c)) continue;
      std::vector<int> trial = selected;
      trial.insert(std::upper_bound(trial.begin(), trial.end(), c), c);
      FactorPtr f = attempt(trial);
      if (f && (!step_best || f->bic > step_best->bic)) {
        step_best = std::move(f);
        step_cov = c;
      }
    }
    if (!step_best || (best && !(step_best->bic > best->bic))) break;
    best = std::move(step_best);
    selected.insert(std::upper_bound(selected.begin(), selected.end(), step_cov), step_cov);
  }
  cache.insert(key, best);
  if (!best) fail(ErrorCode::NoAdmissibleFamily, "no admissible family for the component");
  return best;
}

GraphScore score_graph(const CountDataset& data, const Pdag& g, std::span<const int> covariate_pool,
                       const FamilyMenu& menu, ScoreCache& cache) {
  if (static_cast<std::size_t>(g.n_vertices()) != data.n_vars())
    fail(ErrorCode::DimensionMismatch, "graph and dataset differ in number of variables");
  ChainPartition part = chain_components(g);
  std::vector<FactorPtr> factors;
  double total = 0.0;
  const std::vector<int> pool(covariate_pool.begin(), covariate_pool.end());
  for (const auto& comp : part.components) {
    FactorPtr f = score_factor(data, comp, parent_vertices(g, comp), pool, menu, cache);
    total += f->bic;
    factors.push_back(std::move(f));
  }
  GraphScore out;
  out.total_bic = total;
  out.model.graph = g;
  out.model.partition = std::move(part);
  out.model.factors = std::move(factors);
  out.model.count_names = data.count_names();
  out.model.covariate_names = data.covariate_names();
  return out;
}

double Scorer::score(const Pdag& g) const {
  try {
    return score_graph(data_, g, pool_, menu_, cache_).total_bic;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoAdmissibleFamily) return kNegInf;
    throw;
  }
}

GraphScore Scorer::evaluate(const Pdag& g) const { return score_graph(data_, g, pool_, menu_, cache_); }

}  // namespace pdagcount
