#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pdagcount/dataset.hpp"
#include "pdagcount/distributions.hpp"
#include "pdagcount/pdag.hpp"
#include "pdagcount/regression.hpp"

namespace pdagcount {

// Product of independent marginal fits, one per component vertex.
struct IndependentMarginals {
  std::vector<FitResult> per_vertex;
};

// Product of independent GLMs sharing the component's design.
struct IndependentGlms {
  std::vector<GlmFit> per_vertex;
};

// Empirical conditional distribution: one table per observed parent
// configuration, plus the pooled table used when sampling an unseen one.
struct FrequencyTable {
  using Cell = std::vector<Count>;
  std::map<Cell, std::map<Cell, double>> conditional;
  std::map<Cell, double> pooled;
};

using FactorModel =
    std::variant<FitResult, IndependentMarginals, GlmFit, MultinomialLogitFit, IndependentGlms, FrequencyTable>;

// One conditional term P(N_c | N_pa(c), X_S) of the factorization.
struct FittedFactor {
  std::vector<int> component;   // sorted vertex ids
  std::vector<int> parents;     // sorted parent vertex ids
  std::vector<int> covariates;  // sorted covariate indices actually used
  ParentEncoding encoding = ParentEncoding::Identity;
  std::string family;
  FactorModel model;
  double loglik = 0.0;
  int n_params = 0;
  std::size_t n_obs = 0;
  double bic = 0.0;

  // Design tags: intercept, parents, covariates.
  std::vector<ColumnTag> design_tags() const;
};

double factor_logpmf(const FittedFactor& factor, std::span<const Count> counts_row,
                     std::span<const double> covariate_row);

// Draws the component's values; parent entries of `counts_row` must already be set.
std::vector<Count> sample_factor(const FittedFactor& factor, std::span<const Count> counts_row,
                                 std::span<const double> covariate_row, Rng& rng);

struct PdagModel {
  Pdag graph;
  ChainPartition partition;
  // Aligned with partition.components.
  std::vector<std::shared_ptr<const FittedFactor>> factors;
  std::vector<std::string> count_names;
  std::vector<std::string> covariate_names;

  double total_bic() const;
  // Throws InvalidArgument when a factor does not match its component.
  void validate() const;
};

PdagModel make_model(Pdag graph, std::vector<std::shared_ptr<const FittedFactor>> factors,
                     std::vector<std::string> count_names, std::vector<std::string> covariate_names);

double joint_logpmf(const PdagModel& model, std::span<const Count> counts_row,
                    std::span<const double> covariate_row);

// Ancestral sampling in topological order of the component DAG. When the
// model has covariates, covariate_rows must hold n rows of matching arity.
CountDataset sample(const PdagModel& model, std::size_t n,
                    const std::vector<std::vector<double>>& covariate_rows, std::uint64_t seed);

}  // namespace pdagcount
