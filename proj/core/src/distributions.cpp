#include "pdagcount/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "pdagcount/error.hpp"
#include "pdagcount/math.hpp"
#include "size_solver.hpp"

namespace pdagcount {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Distinct values with (possibly fractional) weights.
struct Weighted {
  std::vector<Count> values;
  std::vector<double> weights;

  double total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
  double weighted_sum() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += weights[i] * static_cast<double>(values[i]);
    return s;
  }
};

Weighted histogram(std::span<const Count> data) {
  std::map<Count, double> counts;
  for (Count x : data) {
    if (x < 0) fail(ErrorCode::NegativeCount, "negative value " + std::to_string(x));
    counts[x] += 1.0;
  }
  Weighted h;
  for (auto [v, c] : counts) {
    h.values.push_back(v);
    h.weights.push_back(c);
  }
  return h;
}

void require_nonempty(std::span<const Count> data) {
  if (data.empty()) fail(ErrorCode::EmptyData, "no observations");
}

double weighted_loglik(const Weighted& h, const BaseParams& params) {
  double ll = 0.0;
  for (std::size_t i = 0; i < h.values.size(); ++i) {
    if (h.weights[i] == 0.0) continue;
    ll += h.weights[i] * logpmf(params, h.values[i]);
  }
  return ll;
}

FitResult make_result(Params params, double loglik, int n_params, std::size_t n_obs) {
  FitResult r;
  r.params = std::move(params);
  r.loglik = loglik;
  r.n_params = n_params;
  r.n_obs = n_obs;
  r.bic = bic(loglik, n_params, n_obs);
  return r;
}

// psi(x + r) - psi(r) and its derivative in r, exact finite sums for small x.
double digamma_diff(Count x, double r) {
  if (x <= 64) {
    double s = 0.0;
    for (Count k = 0; k < x; ++k) s += 1.0 / (r + static_cast<double>(k));
    return s;
  }
  return digamma(static_cast<double>(x) + r) - digamma(r);
}

double trigamma_diff(Count x, double r) {
  if (x <= 64) {
    double s = 0.0;
    for (Count k = 0; k < x; ++k) {
      const double d = r + static_cast<double>(k);
      s -= 1.0 / (d * d);
    }
    return s;
  }
  return trigamma(static_cast<double>(x) + r) - trigamma(r);
}

struct NegBinProfile {
  double size;
  double mean;
};

// Maximizes the negative binomial likelihood in size with prob profiled out
// through the weighted mean. Newton steps on log(size), safeguarded by a
// sign bracket of the score.
NegBinProfile negbin_profile(const Weighted& h, double start_size) {
  const double w = h.total();
  const double m = h.weighted_sum() / w;
  auto score = [&](double r) {
    double s = w * std::log(r / (r + m));
    for (std::size_t i = 0; i < h.values.size(); ++i) s += h.weights[i] * digamma_diff(h.values[i], r);
    return s;
  };
  auto hessian = [&](double r) {
    double s = w * m / (r * (r + m));
    for (std::size_t i = 0; i < h.values.size(); ++i) s += h.weights[i] * trigamma_diff(h.values[i], r);
    return s;
  };

  const double size = detail::solve_size(score, hessian, start_size, 1e-10 * std::max(1.0, w));
  return {size, m};
}

bool overdispersed(const Weighted& h) {
  const double w = h.total();
  const double m = h.weighted_sum() / w;
  double v = 0.0;
  for (std::size_t i = 0; i < h.values.size(); ++i) {
    const double d = static_cast<double>(h.values[i]) - m;
    v += h.weights[i] * d * d;
  }
  v /= w;
  return v > m;
}

double moment_size(const Weighted& h) {
  const double w = h.total();
  const double m = h.weighted_sum() / w;
  double v = 0.0;
  for (std::size_t i = 0; i < h.values.size(); ++i) {
    const double d = static_cast<double>(h.values[i]) - m;
    v += h.weights[i] * d * d;
  }
  v /= w;
  return v > m ? m * m / (v - m) : 1.0;
}

struct BinomialProfile {
  Count trials;
  double prob;
  double loglik;
};

double binomial_profile_loglik(const Weighted& h, Count t, double mean) {
  const double p = mean / static_cast<double>(t);
  double ll = 0.0;
  for (std::size_t i = 0; i < h.values.size(); ++i) {
    if (h.weights[i] == 0.0) continue;
    ll += h.weights[i] * binomial_logpmf(h.values[i], t, p);
  }
  return ll;
}

BinomialProfile binomial_profile(const Weighted& h, Count tmin, Count tmax) {
  const double mean = h.weighted_sum() / h.total();
  BinomialProfile best{tmin, mean / static_cast<double>(tmin), kNegInf};
  for (Count t = tmin; t <= tmax; ++t) {
    const double ll = binomial_profile_loglik(h, t, mean);
    if (ll > best.loglik) best = {t, mean / static_cast<double>(t), ll};
  }
  return best;
}

Count max_value(std::span<const Count> data) { return *std::max_element(data.begin(), data.end()); }

}  // namespace

double bic(double loglik, int n_params, std::size_t n_obs) {
  if (n_obs < 1) fail(ErrorCode::InvalidArgument, "bic requires n_obs >= 1");
  return loglik - 0.5 * static_cast<double>(n_params) * std::log(static_cast<double>(n_obs));
}

FitResult fit_poisson(std::span<const Count> data) {
  require_nonempty(data);
  const Weighted h = histogram(data);
  const double lambda = h.weighted_sum() / static_cast<double>(data.size());
  PoissonParams p{lambda};
  return make_result(p, weighted_loglik(h, p), 1, data.size());
}

FitResult fit_binomial(std::span<const Count> data) {
  require_nonempty(data);
  const Weighted h = histogram(data);
  const Count mx = max_value(data);
  if (mx == 0) {
    FitResult r = make_result(BinomialParams{1, 0.0}, 0.0, 2, data.size());
    r.degenerate = true;
    return r;
  }
  const BinomialProfile best = binomial_profile(h, mx, 10 * mx + 10);
  BinomialParams p{best.trials, best.prob};
  return make_result(p, weighted_loglik(h, p), 2, data.size());
}

FitResult fit_negbin(std::span<const Count> data) {
  require_nonempty(data);
  const Weighted h = histogram(data);
  if (!overdispersed(h)) fail(ErrorCode::NotOverdispersed, "sample variance does not exceed the mean");
  const NegBinProfile prof = negbin_profile(h, moment_size(h));
  NegBinParams p{prof.size, prof.size / (prof.size + prof.mean)};
  return make_result(p, weighted_loglik(h, p), 2, data.size());
}

FitResult fit_best_base(std::span<const Count> data) {
  require_nonempty(data);
  FitResult best = fit_poisson(data);
  auto consider = [&](auto&& fitter) {
    try {
      FitResult r = fitter(data);
      if (r.bic > best.bic) best = std::move(r);
    } catch (const Error& e) {
      if (!is_skip_error(e.code())) throw;
    }
  };
  consider(fit_binomial);
  consider(fit_negbin);
  return best;
}

FitResult fit_mixture(std::span<const Count> data, BaseFamily family, int m,
                      const MixtureOptions& options) {
  require_nonempty(data);
  if (m < 2) fail(ErrorCode::InvalidArgument, "mixture order must be at least 2");
  const Weighted h = histogram(data);
  if (h.values.size() < static_cast<std::size_t>(m))
    fail(ErrorCode::TooFewDistinctValues, "mixture of order " + std::to_string(m) + " needs " +
                                              std::to_string(m) + " distinct values");
  const std::size_t n = data.size();
  const Count gmax = h.values.back();
  const Count tmin = gmax;
  const Count tmax = 10 * gmax + 10;

  // Quantile initialization: m equal-frequency blocks of the sorted data.
  std::vector<Count> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<BaseParams> comps;
  for (int k = 0; k < m; ++k) {
    const std::size_t b = n * static_cast<std::size_t>(k) / static_cast<std::size_t>(m);
    const std::size_t e = n * static_cast<std::size_t>(k + 1) / static_cast<std::size_t>(m);
    const Weighted block = histogram(std::span<const Count>(sorted).subspan(b, e - b));
    const double bm = block.weighted_sum() / block.total();
    switch (family) {
      case BaseFamily::Poisson:
        comps.emplace_back(PoissonParams{bm});
        break;
      case BaseFamily::Binomial: {
        const BinomialProfile prof = binomial_profile(block, tmin, tmax);
        comps.emplace_back(BinomialParams{prof.trials, prof.prob});
        break;
      }
      case BaseFamily::NegBin: {
        const double mean = std::max(bm, 1e-6);
        double size = 10.0;
        if (overdispersed(block)) {
          try {
            size = negbin_profile(block, moment_size(block)).size;
          } catch (const Error&) {
          }
        }
        comps.emplace_back(NegBinParams{size, size / (size + mean)});
        break;
      }
    }
  }
  std::vector<double> weights(static_cast<std::size_t>(m), 1.0 / m);

  const std::size_t nv = h.values.size();
  std::vector<std::vector<double>> lp(static_cast<std::size_t>(m), std::vector<double>(nv));
  auto evaluate = [&]() {
    for (int k = 0; k < m; ++k) {
      const double lw = std::log(weights[k]);
      for (std::size_t i = 0; i < nv; ++i) lp[k][i] = lw + logpmf(comps[k], h.values[i]);
    }
    double ll = 0.0;
    std::vector<double> col(static_cast<std::size_t>(m));
    for (std::size_t i = 0; i < nv; ++i) {
      for (int k = 0; k < m; ++k) col[k] = lp[k][i];
      ll += h.weights[i] * log_sum_exp(col);
    }
    return ll;
  };

  double ll = evaluate();
  if (!std::isfinite(ll)) fail(ErrorCode::NonConverged, "mixture initialization has zero likelihood");
  std::vector<double> trace{ll};
  bool converged = false;
  std::vector<double> col(static_cast<std::size_t>(m));
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    // E-step: responsibilities times observation weights, per component.
    std::vector<Weighted> resp(static_cast<std::size_t>(m), Weighted{h.values, std::vector<double>(nv)});
    for (std::size_t i = 0; i < nv; ++i) {
      for (int k = 0; k < m; ++k) col[k] = lp[k][i];
      const double norm = log_sum_exp(col);
      for (int k = 0; k < m; ++k) resp[k].weights[i] = h.weights[i] * std::exp(col[k] - norm);
    }
    // M-step.
    for (int k = 0; k < m; ++k) {
      const Weighted& r = resp[k];
      const double wk = r.total();
      if (!(wk > 1e-300)) fail(ErrorCode::NonConverged, "mixture component collapsed");
      weights[k] = wk / static_cast<double>(n);
      const double mk = r.weighted_sum() / wk;
      switch (family) {
        case BaseFamily::Poisson:
          comps[k] = PoissonParams{mk};
          break;
        case BaseFamily::Binomial: {
          Count t = std::get<BinomialParams>(comps[k]).trials;
          double best = binomial_profile_loglik(r, t, mk);
          for (int dir : {+1, -1}) {
            while (true) {
              const Count cand = t + dir;
              if (cand < tmin || cand > tmax) break;
              const double q = binomial_profile_loglik(r, cand, mk);
              if (!(q > best)) break;
              best = q;
              t = cand;
            }
          }
          // mk / t can round to 1 and make the profile -inf; never step below
          // the current parameters.
          if (best >= weighted_loglik(r, comps[k])) comps[k] = BinomialParams{t, mk / static_cast<double>(t)};
          break;
        }
        case BaseFamily::NegBin: {
          const double mean = std::max(mk, 1e-300);
          const double old_size = std::get<NegBinParams>(comps[k]).size;
          NegBinParams current{old_size, old_size / (old_size + mean)};
          if (overdispersed(r)) {
            try {
              const NegBinProfile prof = negbin_profile(r, old_size);
              NegBinParams cand{prof.size, prof.size / (prof.size + mean)};
              if (weighted_loglik(r, cand) > weighted_loglik(r, current)) current = cand;
            } catch (const Error&) {
            }
          }
          comps[k] = current;
          break;
        }
      }
    }
    const double next = evaluate();
    trace.push_back(next);
    const double gain = next - ll;
    ll = next;
    if (gain < options.tolerance) {
      converged = true;
      break;
    }
  }

  const int n_params = m * base_param_count(family) + (m - 1);
  FitResult r = make_result(MixtureParams{weights, comps}, ll, n_params, n);
  r.converged = converged;
  r.trace = std::move(trace);
  return r;
}

FitResult fit_multinomial_split(const CountMatrix& rows) {
  if (rows.empty()) fail(ErrorCode::EmptyData, "no observations");
  const std::size_t d = rows.front().size();
  if (d < 2) fail(ErrorCode::InvalidArgument, "multinomial split needs at least 2 variables");
  std::vector<Count> totals(rows.size());
  std::vector<double> colsum(d, 0.0);
  double split_ll = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) fail(ErrorCode::DimensionMismatch, "ragged count matrix");
    Count s = 0;
    for (std::size_t j = 0; j < d; ++j) {
      s += rows[i][j];
      colsum[j] += static_cast<double>(rows[i][j]);
      split_ll -= log_factorial(static_cast<double>(rows[i][j]));
    }
    totals[i] = s;
    split_ll += log_factorial(static_cast<double>(s));
  }
  const double grand = std::accumulate(colsum.begin(), colsum.end(), 0.0);
  if (grand == 0.0) fail(ErrorCode::AllZeroData, "proportions unidentifiable on all-zero data");
  std::vector<double> props(d);
  for (std::size_t j = 0; j < d; ++j) {
    props[j] = colsum[j] / grand;
    split_ll += xlogy(colsum[j], props[j]);
  }
  FitResult total = fit_best_base(totals);
  BaseParams total_params = std::visit(
      [](const auto& p) -> BaseParams {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PoissonParams> || std::is_same_v<T, BinomialParams> ||
                      std::is_same_v<T, NegBinParams>)
          return p;
        else
          fail(ErrorCode::InvalidArgument, "unexpected total family");
      },
      total.params);
  return make_result(MultinomialSplitParams{total_params, props}, total.loglik + split_ll,
                     total.n_params + static_cast<int>(d) - 1, rows.size());
}

double mv_poisson_logpmf(const MvPoissonParams& params, std::span<const Count> x) {
  if (x.size() != params.lambdas.size())
    fail(ErrorCode::DimensionMismatch, "mv-poisson dimension mismatch");
  if (params.lambda0 == 0.0) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += poisson_logpmf(x[j], params.lambdas[j]);
    return s;
  }
  const Count kmax = *std::min_element(x.begin(), x.end());
  if (kmax < 0) return kNegInf;
  std::vector<double> terms(static_cast<std::size_t>(kmax + 1));
  for (Count k = 0; k <= kmax; ++k) {
    double t = poisson_logpmf(k, params.lambda0);
    for (std::size_t j = 0; j < x.size(); ++j) t += poisson_logpmf(x[j] - k, params.lambdas[j]);
    terms[static_cast<std::size_t>(k)] = t;
  }
  return log_sum_exp(terms);
}

FitResult fit_mv_poisson(const CountMatrix& rows, const MvPoissonOptions& options) {
  const std::size_t n = rows.size();
  if (n < 2) fail(ErrorCode::InvalidArgument, "mv-poisson needs at least 2 observations");
  const std::size_t d = rows.front().size();
  if (d < 2) fail(ErrorCode::InvalidArgument, "mv-poisson needs at least 2 variables");

  std::map<std::vector<Count>, double> patterns;
  std::vector<double> means(d, 0.0);
  for (const auto& row : rows) {
    if (row.size() != d) fail(ErrorCode::DimensionMismatch, "ragged count matrix");
    patterns[row] += 1.0;
    for (std::size_t j = 0; j < d; ++j) means[j] += static_cast<double>(row[j]);
  }
  for (double& mj : means) mj /= static_cast<double>(n);
  const double min_mean = *std::min_element(means.begin(), means.end());
  if (min_mean <= 0.0) fail(ErrorCode::DegenerateData, "mv-poisson needs positive column means");

  double min_cov = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a + 1; b < d; ++b) {
      double c = 0.0;
      for (const auto& row : rows)
        c += (static_cast<double>(row[a]) - means[a]) * (static_cast<double>(row[b]) - means[b]);
      min_cov = std::min(min_cov, c / static_cast<double>(n - 1));
    }
  if (min_cov < 0.0) fail(ErrorCode::NegativeDependence, "negative pairwise sample covariance");

  MvPoissonParams params;
  params.lambda0 = std::min(min_cov, 0.99 * min_mean);
  params.lambdas.resize(d);
  for (std::size_t j = 0; j < d; ++j) params.lambdas[j] = means[j] - params.lambda0;

  auto loglik = [&]() {
    double ll = 0.0;
    for (const auto& [row, c] : patterns) ll += c * mv_poisson_logpmf(params, row);
    return ll;
  };

  double ll = loglik();
  std::vector<double> trace{ll};
  bool converged = false;
  std::vector<double> terms;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    // E-step: posterior mean of the common shock for each distinct row.
    double shock = 0.0;
    if (params.lambda0 > 0.0) {
      for (const auto& [row, c] : patterns) {
        const Count kmax = *std::min_element(row.begin(), row.end());
        terms.assign(static_cast<std::size_t>(kmax + 1), 0.0);
        for (Count k = 0; k <= kmax; ++k) {
          double t = poisson_logpmf(k, params.lambda0);
          for (std::size_t j = 0; j < d; ++j) t += poisson_logpmf(row[j] - k, params.lambdas[j]);
          terms[static_cast<std::size_t>(k)] = t;
        }
        const double norm = log_sum_exp(terms);
        double ek = 0.0;
        for (Count k = 1; k <= kmax; ++k)
          ek += static_cast<double>(k) * std::exp(terms[static_cast<std::size_t>(k)] - norm);
        shock += c * ek;
      }
    }
    params.lambda0 = shock / static_cast<double>(n);
    for (std::size_t j = 0; j < d; ++j)
      params.lambdas[j] = std::max(means[j] - params.lambda0, 1e-12 * means[j]);
    const double next = loglik();
    trace.push_back(next);
    const double gain = next - ll;
    ll = next;
    if (gain < options.tolerance) {
      converged = true;
      break;
    }
  }
  FitResult r = make_result(params, ll, static_cast<int>(d) + 1, n);
  r.converged = converged;
  r.trace = std::move(trace);
  return r;
}

double logpmf(const BaseParams& params, Count x) {
  return std::visit(Overloaded{
                        [x](const PoissonParams& p) { return poisson_logpmf(x, p.lambda); },
                        [x](const BinomialParams& p) { return binomial_logpmf(x, p.trials, p.prob); },
                        [x](const NegBinParams& p) { return negbin_logpmf(x, p.size, p.prob); },
                    },
                    params);
}

double logpmf(const UnivariateParams& params, Count x) {
  return std::visit(Overloaded{
                        [x](const MixtureParams& p) {
                          std::vector<double> terms(p.weights.size());
                          for (std::size_t k = 0; k < terms.size(); ++k)
                            terms[k] = std::log(p.weights[k]) + logpmf(p.components[k], x);
                          return log_sum_exp(terms);
                        },
                        [x](const auto& p) { return logpmf(BaseParams{p}, x); },
                    },
                    params);
}

double multinomial_split_logpmf(const MultinomialSplitParams& params, std::span<const Count> x) {
  if (x.size() != params.proportions.size())
    fail(ErrorCode::DimensionMismatch, "multinomial split dimension mismatch");
  Count s = 0;
  double ll = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < 0) return kNegInf;
    s += x[j];
    if (x[j] > 0 && params.proportions[j] <= 0.0) return kNegInf;
    ll += xlogy(static_cast<double>(x[j]), params.proportions[j]) -
          log_factorial(static_cast<double>(x[j]));
  }
  return ll + log_factorial(static_cast<double>(s)) + logpmf(params.total, s);
}

double logpmf(const Params& params, std::span<const Count> x) {
  return std::visit(Overloaded{
                        [x](const MultinomialSplitParams& p) { return multinomial_split_logpmf(p, x); },
                        [x](const MvPoissonParams& p) { return mv_poisson_logpmf(p, x); },
                        [x](const MixtureParams& p) {
                          if (x.size() != 1) fail(ErrorCode::DimensionMismatch, "univariate family");
                          return logpmf(UnivariateParams{p}, x[0]);
                        },
                        [x](const auto& p) {
                          if (x.size() != 1) fail(ErrorCode::DimensionMismatch, "univariate family");
                          return logpmf(BaseParams{p}, x[0]);
                        },
                    },
                    params);
}

Count sample(const BaseParams& params, Rng& rng) {
  return std::visit(Overloaded{
                        [&rng](const PoissonParams& p) -> Count {
                          if (p.lambda < 1e-12) return 0;
                          return std::poisson_distribution<Count>(p.lambda)(rng);
                        },
                        [&rng](const BinomialParams& p) -> Count {
                          return std::binomial_distribution<Count>(p.trials, std::clamp(p.prob, 0.0, 1.0))(rng);
                        },
                        [&rng](const NegBinParams& p) -> Count {
                          const double rate = std::gamma_distribution<double>(p.size, (1.0 - p.prob) / p.prob)(rng);
                          if (rate < 1e-12) return 0;
                          return std::poisson_distribution<Count>(rate)(rng);
                        },
                    },
                    params);
}

Count sample(const UnivariateParams& params, Rng& rng) {
  return std::visit(Overloaded{
                        [&rng](const MixtureParams& p) -> Count {
                          std::discrete_distribution<std::size_t> pick(p.weights.begin(), p.weights.end());
                          return sample(p.components[pick(rng)], rng);
                        },
                        [&rng](const auto& p) -> Count { return sample(BaseParams{p}, rng); },
                    },
                    params);
}

std::vector<Count> sample_multinomial(Count total, std::span<const double> proportions, Rng& rng) {
  std::vector<Count> out(proportions.size(), 0);
  Count remaining = total;
  double mass = 1.0;
  for (std::size_t j = 0; j + 1 < proportions.size() && remaining > 0; ++j) {
    const double p = mass > 0.0 ? std::clamp(proportions[j] / mass, 0.0, 1.0) : 0.0;
    out[j] = std::binomial_distribution<Count>(remaining, p)(rng);
    remaining -= out[j];
    mass -= proportions[j];
  }
  if (!out.empty()) out.back() += remaining;
  return out;
}

std::vector<Count> sample(const Params& params, std::size_t dim, Rng& rng) {
  return std::visit(Overloaded{
                        [&](const MultinomialSplitParams& p) {
                          const Count total = sample(p.total, rng);
                          return sample_multinomial(total, p.proportions, rng);
                        },
                        [&](const MvPoissonParams& p) {
                          const Count shock =
                              p.lambda0 < 1e-12 ? 0 : std::poisson_distribution<Count>(p.lambda0)(rng);
                          std::vector<Count> out(p.lambdas.size());
                          for (std::size_t j = 0; j < out.size(); ++j)
                            out[j] = shock + sample(BaseParams{PoissonParams{p.lambdas[j]}}, rng);
                          return out;
                        },
                        [&](const MixtureParams& p) {
                          if (dim != 1) fail(ErrorCode::DimensionMismatch, "univariate family");
                          return std::vector<Count>{sample(UnivariateParams{p}, rng)};
                        },
                        [&](const auto& p) {
                          if (dim != 1) fail(ErrorCode::DimensionMismatch, "univariate family");
                          return std::vector<Count>{sample(BaseParams{p}, rng)};
                        },
                    },
                    params);
}

UnivariateParams to_univariate(const BaseParams& params) {
  return std::visit([](const auto& p) -> UnivariateParams { return p; }, params);
}

BaseFamily base_family(const BaseParams& params) {
  return std::visit(Overloaded{
                        [](const PoissonParams&) { return BaseFamily::Poisson; },
                        [](const BinomialParams&) { return BaseFamily::Binomial; },
                        [](const NegBinParams&) { return BaseFamily::NegBin; },
                    },
                    params);
}

int base_param_count(BaseFamily family) { return family == BaseFamily::Poisson ? 1 : 2; }

std::string family_name(BaseFamily family) {
  switch (family) {
    case BaseFamily::Poisson: return "poisson";
    case BaseFamily::Binomial: return "binomial";
    case BaseFamily::NegBin: return "negbin";
  }
  return "unknown";
}

std::string family_name(const Params& params) {
  return std::visit(Overloaded{
                        [](const PoissonParams&) -> std::string { return "poisson"; },
                        [](const BinomialParams&) -> std::string { return "binomial"; },
                        [](const NegBinParams&) -> std::string { return "negbin"; },
                        [](const MixtureParams& p) -> std::string {
                          return "mixture-" + family_name(base_family(p.components.front())) + "-" +
                                 std::to_string(p.components.size());
                        },
                        [](const MultinomialSplitParams&) -> std::string { return "multinomial-split"; },
                        [](const MvPoissonParams&) -> std::string { return "mv-poisson"; },
                    },
                    params);
}

double mean(const BaseParams& params) {
  return std::visit(Overloaded{
                        [](const PoissonParams& p) { return p.lambda; },
                        [](const BinomialParams& p) { return static_cast<double>(p.trials) * p.prob; },
                        [](const NegBinParams& p) { return p.mean(); },
                    },
                    params);
}

}  // namespace pdagcount
