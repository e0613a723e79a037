#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pdagcount/dataset.hpp"

namespace pdagcount {

using Rng = std::mt19937_64;

struct PoissonParams {
  double lambda = 0.0;
};

struct BinomialParams {
  Count trials = 1;
  double prob = 0.0;
};

// Success-probability parameterization: mean = size * (1 - prob) / prob.
struct NegBinParams {
  double size = 1.0;
  double prob = 0.5;

  double mean() const noexcept { return size * (1.0 - prob) / prob; }
};

enum class BaseFamily { Poisson, Binomial, NegBin };

using BaseParams = std::variant<PoissonParams, BinomialParams, NegBinParams>;

struct MixtureParams {
  std::vector<double> weights;
  std::vector<BaseParams> components;
};

using UnivariateParams = std::variant<PoissonParams, BinomialParams, NegBinParams, MixtureParams>;

// Component total S drawn from a univariate family, then split across the
// d component variables multinomially.
struct MultinomialSplitParams {
  BaseParams total;
  std::vector<double> proportions;
};

// Common-shock model: N_j = Y_j + Y_0 with Y_0 ~ Poisson(lambda0),
// Y_j ~ Poisson(lambdas[j]) independent.
struct MvPoissonParams {
  double lambda0 = 0.0;
  std::vector<double> lambdas;
};

using Params = std::variant<PoissonParams, BinomialParams, NegBinParams, MixtureParams,
                            MultinomialSplitParams, MvPoissonParams>;

struct FitResult {
  Params params;
  double loglik = 0.0;
  int n_params = 0;
  std::size_t n_obs = 0;
  double bic = 0.0;
  // Binomial on all-zero data: trials unidentifiable, convention trials=1, prob=0.
  bool degenerate = false;
  // False when an EM fitter stopped at its iteration cap.
  bool converged = true;
  // Log-likelihood after initialization and after each EM iteration.
  std::vector<double> trace;
};

// Larger is better: loglik - 0.5 * n_params * ln(n_obs).
double bic(double loglik, int n_params, std::size_t n_obs);

FitResult fit_poisson(std::span<const Count> data);
FitResult fit_binomial(std::span<const Count> data);
FitResult fit_negbin(std::span<const Count> data);

struct MixtureOptions {
  double tolerance = 1e-8;
  int max_iterations = 500;
};

FitResult fit_mixture(std::span<const Count> data, BaseFamily family, int m,
                      const MixtureOptions& options = {});

// Best of {Poisson, binomial, negative binomial} by BIC; negative binomial
// is skipped when the data are not overdispersed.
FitResult fit_best_base(std::span<const Count> data);

FitResult fit_multinomial_split(const CountMatrix& rows);

struct MvPoissonOptions {
  double tolerance = 1e-8;
  int max_iterations = 500;
};

FitResult fit_mv_poisson(const CountMatrix& rows, const MvPoissonOptions& options = {});

double logpmf(const BaseParams& params, Count x);
double logpmf(const UnivariateParams& params, Count x);
double mv_poisson_logpmf(const MvPoissonParams& params, std::span<const Count> x);
double multinomial_split_logpmf(const MultinomialSplitParams& params, std::span<const Count> x);
// Dispatches on the parameter kind; univariate kinds expect x.size() == 1.
double logpmf(const Params& params, std::span<const Count> x);

Count sample(const BaseParams& params, Rng& rng);
Count sample(const UnivariateParams& params, Rng& rng);
std::vector<Count> sample(const Params& params, std::size_t dim, Rng& rng);
// Splits `total` multinomially over `proportions` by sequential binomials.
std::vector<Count> sample_multinomial(Count total, std::span<const double> proportions, Rng& rng);

UnivariateParams to_univariate(const BaseParams& params);
BaseFamily base_family(const BaseParams& params);
int base_param_count(BaseFamily family);
std::string family_name(BaseFamily family);
// "poisson", "binomial", "negbin", "mixture-poisson-2", "multinomial-split", "mv-poisson".
std::string family_name(const Params& params);

double mean(const BaseParams& params);

}  // namespace pdagcount
