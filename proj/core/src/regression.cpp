#include "pdagcount/regression.hpp"

#include <algorithm>
#include <cmath>

#include "pdagcount/error.hpp"
#include "pdagcount/math.hpp"
#include "size_solver.hpp"

namespace pdagcount {
namespace {

double log1pexp(double eta) { return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta)); }

double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double row_loglik(GlmFamily family, Count y, double eta, double size, Count trials) {
  const double yd = static_cast<double>(y);
  switch (family) {
    case GlmFamily::PoissonLog:
      return yd * eta - std::exp(eta) - log_factorial(yd);
    case GlmFamily::NegBinLog: {
      const double mu = std::exp(eta);
      const double log_rmu = std::log(size + mu);
      return log_gamma(yd + size) - log_gamma(size) - log_factorial(yd) +
             size * (std::log(size) - log_rmu) + yd * (eta - log_rmu);
    }
    case GlmFamily::BinomialLogit: {
      if (y > trials) return kNegInf;
      const double td = static_cast<double>(trials);
      return log_factorial(td) - log_factorial(yd) - log_factorial(td - yd) + yd * eta -
             td * log1pexp(eta);
    }
  }
  return kNegInf;
}

double saturated_row(GlmFamily family, Count y, double size, Count trials) {
  const double yd = static_cast<double>(y);
  switch (family) {
    case GlmFamily::PoissonLog:
      return poisson_logpmf(y, yd);
    case GlmFamily::NegBinLog:
      return negbin_logpmf(y, size, size / (size + yd));
    case GlmFamily::BinomialLogit:
      return binomial_logpmf(y, trials, yd / static_cast<double>(trials));
  }
  return 0.0;
}

struct GlmProblem {
  std::span<const Count> y;
  const Eigen::MatrixXd& x;
  GlmFamily family;
  double size = 0.0;
  Count trials = 0;

  double loglik(const Eigen::VectorXd& beta) const {
    const Eigen::VectorXd eta = x * beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) ll += row_loglik(family, y[i], eta[i], size, trials);
    return std::isnan(ll) ? kNegInf : ll;
  }

  double saturated() const {
    double s = 0.0;
    for (Count v : y) s += saturated_row(family, v, size, trials);
    return s;
  }
};

void check_design(std::size_t n, const DesignMatrix& x) {
  if (static_cast<Eigen::Index>(n) != x.rows())
    fail(ErrorCode::DimensionMismatch, "response length differs from design rows");
  if (x.rows() <= x.cols()) fail(ErrorCode::RankDeficientDesign, "design needs more rows than columns");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x.values);
  if (qr.rank() < x.cols()) fail(ErrorCode::RankDeficientDesign, "design matrix is rank deficient");
}

// IRLS (Fisher scoring for the negative binomial log link) with step halving
// so that the likelihood never decreases between accepted steps.
Eigen::VectorXd irls(const GlmProblem& prob, Eigen::VectorXd beta, const GlmOptions& options,
                     std::vector<double>* trace) {
  const Eigen::MatrixXd& x = prob.x;
  const Eigen::Index n = x.rows();
  const double sat = trace ? prob.saturated() : 0.0;
  double ll = prob.loglik(beta);
  if (!std::isfinite(ll)) fail(ErrorCode::NonConverged, "GLM start has zero likelihood");
  if (trace) trace->push_back(2.0 * (sat - ll));

  Eigen::VectorXd w(n), z(n);
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd eta = x * beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double yi = static_cast<double>(prob.y[i]);
      switch (prob.family) {
        case GlmFamily::PoissonLog: {
          const double mu = std::exp(eta[i]);
          w[i] = mu;
          z[i] = eta[i] + (yi - mu) / std::max(mu, 1e-300);
          break;
        }
        case GlmFamily::NegBinLog: {
          const double mu = std::exp(eta[i]);
          w[i] = mu / (1.0 + mu / prob.size);
          z[i] = eta[i] + (yi - mu) / std::max(mu, 1e-300);
          break;
        }
        case GlmFamily::BinomialLogit: {
          const double p = sigmoid(eta[i]);
          const double t = static_cast<double>(prob.trials);
          w[i] = t * p * (1.0 - p);
          z[i] = eta[i] + (yi - t * p) / std::max(w[i], 1e-300);
          break;
        }
      }
      w[i] = std::max(w[i], 1e-12);
    }
    const Eigen::MatrixXd xtw = x.transpose() * w.asDiagonal();
    const Eigen::MatrixXd info = xtw * x;
    const Eigen::VectorXd target = info.ldlt().solve(xtw * z);
    const Eigen::VectorXd delta = target - beta;
    if (!delta.allFinite()) fail(ErrorCode::NonConverged, "IRLS produced non-finite step");

    double scale = 1.0;
    bool accepted = false;
    Eigen::VectorXd cand;
    double ll_c = kNegInf;
    for (int h = 0; h < 40; ++h) {
      cand = beta + scale * delta;
      ll_c = prob.loglik(cand);
      if (std::isfinite(ll_c) && ll_c >= ll) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) return beta;  // no ascent direction left at working precision
    const double change = (cand - beta).cwiseAbs().maxCoeff();
    beta = cand;
    ll = ll_c;
    if (trace) trace->push_back(2.0 * (sat - ll));
    if (beta.cwiseAbs().maxCoeff() > options.coefficient_bound)
      fail(ErrorCode::NonConverged, "GLM coefficients diverge (separation)");
    if (change < options.tolerance) return beta;
  }
  fail(ErrorCode::NonConverged, "IRLS did not converge");
}

double negbin_size_given_means(std::span<const Count> y, const Eigen::VectorXd& mu, double start) {
  auto score = [&](double r) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      const double yi = static_cast<double>(y[i]);
      s += digamma(yi + r) - digamma(r) + std::log(r / (r + mu[i])) + (mu[i] - yi) / (r + mu[i]);
    }
    return s;
  };
  auto hessian = [&](double r) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      const double yi = static_cast<double>(y[i]);
      const double rm = r + mu[i];
      s += trigamma(yi + r) - trigamma(r) + 1.0 / r - 1.0 / rm - (mu[i] - yi) / (rm * rm);
    }
    return s;
  };
  return detail::solve_size(score, hessian, start, 1e-10 * std::max<double>(1.0, mu.size()));
}

GlmFit finish(GlmFamily family, const GlmProblem& prob, Eigen::VectorXd beta, std::vector<double> trace) {
  GlmFit fit;
  fit.family = family;
  fit.coefficients = std::move(beta);
  fit.loglik = prob.loglik(fit.coefficients);
  fit.n_obs = prob.y.size();
  fit.n_params = static_cast<int>(fit.coefficients.size());
  if (family == GlmFamily::NegBinLog) {
    fit.dispersion = prob.size;
    fit.n_params += 1;
  }
  if (family == GlmFamily::BinomialLogit) {
    fit.trials = prob.trials;
    fit.n_params += 1;
  }
  fit.deviance_trace = std::move(trace);
  return fit;
}

GlmFit fit_poisson_glm(std::span<const Count> y, const DesignMatrix& x, const GlmOptions& options) {
  double total = 0.0;
  for (Count v : y) total += static_cast<double>(v);
  if (total == 0.0) fail(ErrorCode::DegenerateData, "all-zero response");
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
  beta[0] = std::log(total / static_cast<double>(y.size()));
  GlmProblem prob{y, x.values, GlmFamily::PoissonLog};
  std::vector<double> trace;
  beta = irls(prob, beta, options, &trace);
  return finish(GlmFamily::PoissonLog, prob, std::move(beta), std::move(trace));
}

GlmFit fit_binomial_glm(std::span<const Count> y, const DesignMatrix& x, const GlmOptions& options) {
  const Count mx = *std::max_element(y.begin(), y.end());
  if (mx == 0) fail(ErrorCode::DegenerateData, "all-zero response, trials unidentifiable");
  const FitResult marginal = fit_binomial(y);
  Count t = std::get<BinomialParams>(marginal.params).trials;
  const double mean_prob = std::clamp(std::get<BinomialParams>(marginal.params).prob, 1e-6, 1.0 - 1e-6);

  Eigen::VectorXd start = Eigen::VectorXd::Zero(x.cols());
  start[0] = std::log(mean_prob / (1.0 - mean_prob));
  GlmProblem prob{y, x.values, GlmFamily::BinomialLogit, 0.0, t};
  std::vector<double> trace;
  Eigen::VectorXd beta = irls(prob, start, options, &trace);
  double best = prob.loglik(beta);

  // Local profile over trials around the marginal optimum.
  for (int dir : {+1, -1}) {
    while (true) {
      const Count cand = t + dir;
      if (cand < mx || cand > 10 * mx + 10) break;
      GlmProblem p2{y, x.values, GlmFamily::BinomialLogit, 0.0, cand};
      std::vector<double> tr;
      Eigen::VectorXd b2;
      try {
        b2 = irls(p2, beta, options, &tr);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NonConverged) throw;
        break;
      }
      const double ll = p2.loglik(b2);
      if (!(ll > best)) break;
      best = ll;
      t = cand;
      beta = std::move(b2);
      trace = std::move(tr);
    }
  }
  prob.trials = t;
  return finish(GlmFamily::BinomialLogit, prob, std::move(beta), std::move(trace));
}

GlmFit fit_negbin_glm(std::span<const Count> y, const DesignMatrix& x, const GlmOptions& options) {
  const GlmFit pois = fit_poisson_glm(y, x, options);
  const Eigen::VectorXd mu0 = (x.values * pois.coefficients).array().exp();
  double excess = 0.0;
  double mu_sq = 0.0;
  for (Eigen::Index i = 0; i < mu0.size(); ++i) {
    const double d = static_cast<double>(y[i]) - mu0[i];
    excess += d * d - mu0[i];
    mu_sq += mu0[i] * mu0[i];
  }
  if (!(excess > 0.0)) fail(ErrorCode::NotOverdispersed, "no excess variance over the Poisson fit");

  double size = mu_sq / excess;
  Eigen::VectorXd beta = pois.coefficients;
  std::vector<double> trace;
  for (int outer = 0; outer < options.max_iterations; ++outer) {
    GlmProblem prob{y, x.values, GlmFamily::NegBinLog, size};
    trace.clear();
    const Eigen::VectorXd next = irls(prob, beta, options, &trace);
    const Eigen::VectorXd mu = (x.values * next).array().exp();
    const double next_size = negbin_size_given_means(y, mu, size);
    const double change = (next - beta).cwiseAbs().maxCoeff();
    const double size_change = std::abs(std::log(next_size) - std::log(size));
    beta = next;
    size = next_size;
    if (change < options.tolerance && size_change < options.tolerance) {
      GlmProblem final_prob{y, x.values, GlmFamily::NegBinLog, size};
      return finish(GlmFamily::NegBinLog, final_prob, std::move(beta), std::move(trace));
    }
  }
  fail(ErrorCode::NonConverged, "negative binomial GLM alternation did not converge");
}

}  // namespace

DesignMatrix make_design(const CountDataset& data, std::span<const int> parents,
                         std::span<const int> covariates, ParentEncoding encoding) {
  const auto n = static_cast<Eigen::Index>(data.n_rows());
  const auto p = static_cast<Eigen::Index>(1 + parents.size() + covariates.size());
  DesignMatrix d;
  d.values.resize(n, p);
  d.values.col(0).setOnes();
  d.tags.push_back({ColumnSource::Intercept, -1});
  Eigen::Index c = 1;
  for (int v : parents) {
    const auto& col = data.column(static_cast<std::size_t>(v));
    for (Eigen::Index i = 0; i < n; ++i) {
      const double raw = static_cast<double>(col[static_cast<std::size_t>(i)]);
      d.values(i, c) = encoding == ParentEncoding::Log1p ? std::log1p(raw) : raw;
    }
    d.tags.push_back({ColumnSource::Parent, v});
    ++c;
  }
  for (int k : covariates) {
    const auto& col = data.covariate(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < n; ++i) d.values(i, c) = col[static_cast<std::size_t>(i)];
    d.tags.push_back({ColumnSource::Covariate, k});
    ++c;
  }
  return d;
}

Eigen::VectorXd design_row(std::span<const ColumnTag> tags, std::span<const Count> counts,
                           std::span<const double> covariates, ParentEncoding encoding) {
  Eigen::VectorXd row(static_cast<Eigen::Index>(tags.size()));
  for (std::size_t c = 0; c < tags.size(); ++c) {
    const ColumnTag& tag = tags[c];
    switch (tag.source) {
      case ColumnSource::Intercept:
        row[c] = 1.0;
        break;
      case ColumnSource::Parent: {
        if (tag.id < 0 || static_cast<std::size_t>(tag.id) >= counts.size())
          fail(ErrorCode::DimensionMismatch, "parent column outside the count row");
        const double raw = static_cast<double>(counts[static_cast<std::size_t>(tag.id)]);
        row[c] = encoding == ParentEncoding::Log1p ? std::log1p(raw) : raw;
        break;
      }
      case ColumnSource::Covariate:
        if (tag.id < 0 || static_cast<std::size_t>(tag.id) >= covariates.size())
          fail(ErrorCode::DimensionMismatch, "covariate column outside the covariate row");
        row[c] = covariates[static_cast<std::size_t>(tag.id)];
        break;
    }
  }
  return row;
}

double GlmFit::bic() const { return pdagcount::bic(loglik, n_params, n_obs); }
double MultinomialLogitFit::bic() const { return pdagcount::bic(loglik, n_params, n_obs); }

GlmFit fit_glm(std::span<const Count> y, const DesignMatrix& x, GlmFamily family, const GlmOptions& options) {
  check_design(y.size(), x);
  for (Count v : y)
    if (v < 0) fail(ErrorCode::NegativeCount, "negative response");
  switch (family) {
    case GlmFamily::PoissonLog: return fit_poisson_glm(y, x, options);
    case GlmFamily::NegBinLog: return fit_negbin_glm(y, x, options);
    case GlmFamily::BinomialLogit: return fit_binomial_glm(y, x, options);
  }
  fail(ErrorCode::InvalidArgument, "unknown GLM family");
}

GlmFit fit_best_glm(std::span<const Count> y, const DesignMatrix& x, std::span<const GlmFamily> families,
                    const GlmOptions& options) {
  std::optional<GlmFit> best;
  std::optional<Error> last;
  for (GlmFamily f : families) {
    try {
      GlmFit fit = fit_glm(y, x, f, options);
      if (!best || fit.bic() > best->bic()) best = std::move(fit);
    } catch (const Error& e) {
      if (!is_skip_error(e.code())) throw;
      last = e;
    }
  }
  if (best) return *best;
  if (last) throw *last;
  fail(ErrorCode::InvalidArgument, "empty GLM family list");
}

MultinomialLogitFit fit_multinomial_logit(const CountMatrix& y, const DesignMatrix& x,
                                          std::span<const GlmFamily> total_families,
                                          const GlmOptions& options) {
  const std::size_t n = y.size();
  if (n == 0) fail(ErrorCode::EmptyData, "no observations");
  const std::size_t d = y.front().size();
  if (d < 2) fail(ErrorCode::InvalidArgument, "multinomial logit needs at least 2 categories");
  check_design(n, x);
  const auto p = x.cols();
  const auto q = static_cast<Eigen::Index>(d - 1);

  std::vector<Count> totals(n);
  std::vector<double> colsum(d, 0.0);
  double row_const = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i].size() != d) fail(ErrorCode::DimensionMismatch, "ragged count matrix");
    Count s = 0;
    for (std::size_t j = 0; j < d; ++j) {
      if (y[i][j] < 0) fail(ErrorCode::NegativeCount, "negative count");
      s += y[i][j];
      colsum[j] += static_cast<double>(y[i][j]);
      row_const -= log_factorial(static_cast<double>(y[i][j]));
    }
    totals[i] = s;
    row_const += log_factorial(static_cast<double>(s));
  }
  if (std::all_of(totals.begin(), totals.end(), [](Count s) { return s == 0; }))
    fail(ErrorCode::AllZeroData, "all component totals are zero");

  auto probabilities = [&](const Eigen::VectorXd& beta, Eigen::Index i) {
    Eigen::VectorXd eta(q + 1);
    for (Eigen::Index j = 0; j < q; ++j) eta[j] = x.values.row(i).dot(beta.segment(j * p, p));
    eta[q] = 0.0;
    const double mx = eta.maxCoeff();
    Eigen::VectorXd e = (eta.array() - mx).exp();
    return Eigen::VectorXd(e / e.sum());
  };
  auto split_loglik = [&](const Eigen::VectorXd& beta) {
    double ll = row_const;
    for (std::size_t i = 0; i < n; ++i) {
      if (totals[i] == 0) continue;
      const Eigen::VectorXd pi = probabilities(beta, static_cast<Eigen::Index>(i));
      for (std::size_t j = 0; j < d; ++j) ll += xlogy(static_cast<double>(y[i][j]), pi[j]);
    }
    return std::isnan(ll) ? kNegInf : ll;
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(q * p);
  for (Eigen::Index j = 0; j < q; ++j)
    beta[j * p] = std::log((colsum[j] + 0.5) / (colsum[d - 1] + 0.5));
  double ll = split_loglik(beta);
  bool converged = false;
  for (int it = 0; it < options.max_iterations && !converged; ++it) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(q * p);
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(q * p, q * p);
    for (std::size_t i = 0; i < n; ++i) {
      if (totals[i] == 0) continue;
      const auto ii = static_cast<Eigen::Index>(i);
      const Eigen::VectorXd pi = probabilities(beta, ii);
      const Eigen::VectorXd xi = x.values.row(ii).transpose();
      const Eigen::MatrixXd xx = xi * xi.transpose();
      const double s = static_cast<double>(totals[i]);
      for (Eigen::Index j = 0; j < q; ++j) {
        grad.segment(j * p, p) += (static_cast<double>(y[i][j]) - s * pi[j]) * xi;
        for (Eigen::Index k = 0; k < q; ++k) {
          const double c = s * ((j == k ? pi[j] : 0.0) - pi[j] * pi[k]);
          info.block(j * p, k * p, p, p) += c * xx;
        }
      }
    }
    const Eigen::VectorXd delta = info.ldlt().solve(grad);
    if (!delta.allFinite()) fail(ErrorCode::NonConverged, "multinomial Newton step non-finite");
    double scale = 1.0;
    bool accepted = false;
    Eigen::VectorXd cand;
    double ll_c = kNegInf;
    for (int h = 0; h < 40; ++h) {
      cand = beta + scale * delta;
      ll_c = split_loglik(cand);
      if (std::isfinite(ll_c) && ll_c >= ll) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) {
      converged = true;
      break;
    }
    const double change = (cand - beta).cwiseAbs().maxCoeff();
    beta = cand;
    ll = ll_c;
    if (beta.cwiseAbs().maxCoeff() > options.coefficient_bound)
      fail(ErrorCode::NonConverged, "multinomial logit coefficients diverge");
    converged = change < options.tolerance;
  }
  if (!converged) fail(ErrorCode::NonConverged, "multinomial logit Newton did not converge");

  MultinomialLogitFit fit;
  fit.coefficients.resize(q, p);
  for (Eigen::Index j = 0; j < q; ++j) fit.coefficients.row(j) = beta.segment(j * p, p).transpose();
  fit.total_glm = fit_best_glm(totals, x, total_families, options);
  fit.loglik = ll + fit.total_glm.loglik;
  fit.n_params = static_cast<int>(q * p) + fit.total_glm.n_params;
  fit.n_obs = n;
  return fit;
}

double glm_mean(const GlmFit& fit, const Eigen::VectorXd& x_row) {
  if (x_row.size() != fit.coefficients.size())
    fail(ErrorCode::DimensionMismatch, "design row length differs from coefficients");
  const double eta = x_row.dot(fit.coefficients);
  if (fit.family == GlmFamily::BinomialLogit) return static_cast<double>(fit.trials) * sigmoid(eta);
  return std::exp(eta);
}

Eigen::VectorXd split_probabilities(const MultinomialLogitFit& fit, const Eigen::VectorXd& x_row) {
  if (x_row.size() != fit.coefficients.cols())
    fail(ErrorCode::DimensionMismatch, "design row length differs from coefficients");
  const Eigen::Index q = fit.coefficients.rows();
  Eigen::VectorXd eta(q + 1);
  eta.head(q) = fit.coefficients * x_row;
  eta[q] = 0.0;
  const double mx = eta.maxCoeff();
  Eigen::VectorXd e = (eta.array() - mx).exp();
  return e / e.sum();
}

double conditional_logpmf(const GlmFit& fit, Count y, const Eigen::VectorXd& x_row) {
  if (x_row.size() != fit.coefficients.size())
    fail(ErrorCode::DimensionMismatch, "design row length differs from coefficients");
  if (y < 0) return kNegInf;
  const double eta = x_row.dot(fit.coefficients);
  const double ll = row_loglik(fit.family, y, eta, fit.dispersion.value_or(0.0), fit.trials);
  return std::isnan(ll) ? kNegInf : ll;
}

double conditional_logpmf(const MultinomialLogitFit& fit, std::span<const Count> y,
                          const Eigen::VectorXd& x_row) {
  const Eigen::VectorXd pi = split_probabilities(fit, x_row);
  if (static_cast<Eigen::Index>(y.size()) != pi.size())
    fail(ErrorCode::DimensionMismatch, "count row length differs from categories");
  Count s = 0;
  double ll = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (y[j] < 0) return kNegInf;
    s += y[j];
    ll += xlogy(static_cast<double>(y[j]), pi[static_cast<Eigen::Index>(j)]) -
          log_factorial(static_cast<double>(y[j]));
  }
  return ll + log_factorial(static_cast<double>(s)) + conditional_logpmf(fit.total_glm, s, x_row);
}

Count sample_conditional(const GlmFit& fit, const Eigen::VectorXd& x_row, Rng& rng) {
  const double mu = glm_mean(fit, x_row);
  switch (fit.family) {
    case GlmFamily::PoissonLog:
      return sample(BaseParams{PoissonParams{mu}}, rng);
    case GlmFamily::NegBinLog: {
      const double r = *fit.dispersion;
      return sample(BaseParams{NegBinParams{r, r / (r + mu)}}, rng);
    }
    case GlmFamily::BinomialLogit:
      return sample(BaseParams{BinomialParams{fit.trials, mu / static_cast<double>(fit.trials)}}, rng);
  }
  return 0;
}

std::vector<Count> sample_conditional(const MultinomialLogitFit& fit, const Eigen::VectorXd& x_row, Rng& rng) {
  const Count total = sample_conditional(fit.total_glm, x_row, rng);
  const Eigen::VectorXd pi = split_probabilities(fit, x_row);
  return sample_multinomial(total, std::span<const double>(pi.data(), static_cast<std::size_t>(pi.size())), rng);
}

std::string family_name(GlmFamily family) {
  switch (family) {
    case GlmFamily::PoissonLog: return "poisson-log";
    case GlmFamily::NegBinLog: return "negbin-log";
    case GlmFamily::BinomialLogit: return "binomial-logit";
  }
  return "unknown";
}

}  // namespace pdagcount
