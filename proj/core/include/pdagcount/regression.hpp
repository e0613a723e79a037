#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "pdagcount/dataset.hpp"
#include "pdagcount/distributions.hpp"

namespace pdagcount {

enum class ColumnSource { Intercept, Parent, Covariate };

// Where a design column comes from: a parent vertex id, a covariate index,
// or the intercept (id -1).
struct ColumnTag {
  ColumnSource source = ColumnSource::Intercept;
  int id = -1;

  friend bool operator==(const ColumnTag&, const ColumnTag&) = default;
};

// How parent counts enter the linear predictor.
enum class ParentEncoding { Identity, Log1p };

// Intercept first, then parent columns, then covariate columns.
struct DesignMatrix {
  Eigen::MatrixXd values;
  std::vector<ColumnTag> tags;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

DesignMatrix make_design(const CountDataset& data, std::span<const int> parents,
                         std::span<const int> covariates,
                         ParentEncoding encoding = ParentEncoding::Identity);

// Design row for a single observation; `counts` is the full K-vector and
// `covariates` the full covariate vector of that observation.
Eigen::VectorXd design_row(std::span<const ColumnTag> tags, std::span<const Count> counts,
                           std::span<const double> covariates, ParentEncoding encoding);

enum class GlmFamily { PoissonLog, NegBinLog, BinomialLogit };

struct GlmFit {
  GlmFamily family = GlmFamily::PoissonLog;
  Eigen::VectorXd coefficients;
  // Negative binomial size.
  std::optional<double> dispersion;
  // Binomial trials, profiled over the same integer range as the marginal fit.
  Count trials = 0;
  double loglik = 0.0;
  int n_params = 0;
  std::size_t n_obs = 0;
  // Deviance after initialization and after every accepted IRLS step.
  std::vector<double> deviance_trace;

  double bic() const;
};

struct GlmOptions {
  double tolerance = 1e-8;
  int max_iterations = 100;
  double coefficient_bound = 30.0;
};

GlmFit fit_glm(std::span<const Count> y, const DesignMatrix& x, GlmFamily family,
               const GlmOptions& options = {});

// Highest-BIC GLM among `families`; skip errors drop a family.
GlmFit fit_best_glm(std::span<const Count> y, const DesignMatrix& x,
                    std::span<const GlmFamily> families, const GlmOptions& options = {});

// Split proportions by softmax against the last (baseline) category, plus a
// GLM for the row totals.
struct MultinomialLogitFit {
  Eigen::MatrixXd coefficients;  // (d - 1) x p
  GlmFit total_glm;
  double loglik = 0.0;
  int n_params = 0;
  std::size_t n_obs = 0;

  double bic() const;
};

MultinomialLogitFit fit_multinomial_logit(const CountMatrix& y, const DesignMatrix& x,
                                          std::span<const GlmFamily> total_families,
                                          const GlmOptions& options = {});

double glm_mean(const GlmFit& fit, const Eigen::VectorXd& x_row);
Eigen::VectorXd split_probabilities(const MultinomialLogitFit& fit, const Eigen::VectorXd& x_row);

double conditional_logpmf(const GlmFit& fit, Count y, const Eigen::VectorXd& x_row);
double conditional_logpmf(const MultinomialLogitFit& fit, std::span<const Count> y,
                          const Eigen::VectorXd& x_row);

Count sample_conditional(const GlmFit& fit, const Eigen::VectorXd& x_row, Rng& rng);
std::vector<Count> sample_conditional(const MultinomialLogitFit& fit, const Eigen::VectorXd& x_row,
                                      Rng& rng);

std::string family_name(GlmFamily family);

}  // namespace pdagcount
