#include "pdagcount/model.hpp"

#include <algorithm>
#include <numeric>

#include "pdagcount/error.hpp"
#include "pdagcount/math.hpp"

namespace pdagcount {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<Count> component_values(const FittedFactor& f, std::span<const Count> row) {
  std::vector<Count> out;
  out.reserve(f.component.size());
  for (int v : f.component) out.push_back(row[static_cast<std::size_t>(v)]);
  return out;
}

std::vector<Count> parent_values(const FittedFactor& f, std::span<const Count> row) {
  std::vector<Count> out;
  out.reserve(f.parents.size());
  for (int v : f.parents) out.push_back(row[static_cast<std::size_t>(v)]);
  return out;
}

template <class Map, class Rng>
typename Map::key_type draw_cell(const Map& table, Rng& rng) {
  std::vector<double> w;
  w.reserve(table.size());
  for (const auto& [cell, p] : table) w.push_back(p);
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  auto it = table.begin();
  std::advance(it, static_cast<std::ptrdiff_t>(pick(rng)));
  return it->first;
}

}  // namespace

std::vector<ColumnTag> FittedFactor::design_tags() const {
  std::vector<ColumnTag> tags{{ColumnSource::Intercept, -1}};
  for (int p : parents) tags.push_back({ColumnSource::Parent, p});
  for (int c : covariates) tags.push_back({ColumnSource::Covariate, c});
  return tags;
}

double factor_logpmf(const FittedFactor& f, std::span<const Count> counts_row,
                     std::span<const double> covariate_row) {
  for (int v : f.component)
    if (v < 0 || static_cast<std::size_t>(v) >= counts_row.size())
      fail(ErrorCode::DimensionMismatch, "count row too short for factor");
  const std::vector<Count> y = component_values(f, counts_row);
  auto xrow = [&] {
    const auto tags = f.design_tags();
    return design_row(tags, counts_row, covariate_row, f.encoding);
  };
  return std::visit(
      Overloaded{
          [&](const FitResult& fit) { return logpmf(fit.params, y); },
          [&](const IndependentMarginals& m) {
            double s = 0.0;
            for (std::size_t k = 0; k < y.size(); ++k) s += logpmf(m.per_vertex[k].params, std::span(&y[k], 1));
            return s;
          },
          [&](const GlmFit& fit) { return conditional_logpmf(fit, y.front(), xrow()); },
          [&](const MultinomialLogitFit& fit) { return conditional_logpmf(fit, y, xrow()); },
          [&](const IndependentGlms& m) {
            const Eigen::VectorXd x = xrow();
            double s = 0.0;
            for (std::size_t k = 0; k < y.size(); ++k) s += conditional_logpmf(m.per_vertex[k], y[k], x);
            return s;
          },
          [&](const FrequencyTable& t) {
            const auto cfg = t.conditional.find(parent_values(f, counts_row));
            if (cfg == t.conditional.end()) return kNegInf;
            const auto cell = cfg->second.find(y);
            return cell == cfg->second.end() ? kNegInf : std::log(cell->second);
          },
      },
      f.model);
}

std::vector<Count> sample_factor(const FittedFactor& f, std::span<const Count> counts_row,
                                 std::span<const double> covariate_row, Rng& rng) {
  auto xrow = [&] {
    const auto tags = f.design_tags();
    return design_row(tags, counts_row, covariate_row, f.encoding);
  };
  return std::visit(
      Overloaded{
          [&](const FitResult& fit) { return sample(fit.params, f.component.size(), rng); },
          [&](const IndependentMarginals& m) {
            std::vector<Count> out;
            for (const auto& fit : m.per_vertex) out.push_back(sample(fit.params, 1, rng).front());
            return out;
          },
          [&](const GlmFit& fit) { return std::vector<Count>{sample_conditional(fit, xrow(), rng)}; },
          [&](const MultinomialLogitFit& fit) { return sample_conditional(fit, xrow(), rng); },
          [&](const IndependentGlms& m) {
            const Eigen::VectorXd x = xrow();
            std::vector<Count> out;
            for (const auto& fit : m.per_vertex) out.push_back(sample_conditional(fit, x, rng));
            return out;
          },
          [&](const FrequencyTable& t) {
            const auto cfg = t.conditional.find(parent_values(f, counts_row));
            if (cfg == t.conditional.end()) return draw_cell(t.pooled, rng);
            return draw_cell(cfg->second, rng);
          },
      },
      f.model);
}

double PdagModel::total_bic() const {
  double s = 0.0;
  for (const auto& f : factors) s += f->bic;
  return s;
}

void PdagModel::validate() const {
  if (factors.size() != partition.components.size())
    fail(ErrorCode::InvalidArgument, "one factor per chain component required");
  for (std::size_t c = 0; c < factors.size(); ++c) {
    const FittedFactor& f = *factors[c];
    if (f.component != partition.components[c])
      fail(ErrorCode::InvalidArgument, "factor " + std::to_string(c) + " does not match its component");
    if (f.parents != parent_vertices(graph, partition.components[c]))
      fail(ErrorCode::InvalidArgument, "factor " + std::to_string(c) + " parents do not match the graph");
    for (int k : f.covariates)
      if (k < 0 || static_cast<std::size_t>(k) >= covariate_names.size())
        fail(ErrorCode::InvalidArgument, "factor covariate index out of range");
  }
  if (count_names.size() != static_cast<std::size_t>(graph.n_vertices()))
    fail(ErrorCode::InvalidArgument, "count names do not match vertex count");
}

PdagModel make_model(Pdag graph, std::vector<std::shared_ptr<const FittedFactor>> factors,
                     std::vector<std::string> count_names, std::vector<std::string> covariate_names) {
  PdagModel m;
  m.partition = chain_components(graph);
  m.graph = std::move(graph);
  m.factors = std::move(factors);
  m.count_names = std::move(count_names);
  m.covariate_names = std::move(covariate_names);
  m.validate();
  return m;
}

double joint_logpmf(const PdagModel& model, std::span<const Count> counts_row,
                    std::span<const double> covariate_row) {
  if (counts_row.size() != static_cast<std::size_t>(model.graph.n_vertices()))
    fail(ErrorCode::DimensionMismatch, "count row length differs from vertex count");
  if (covariate_row.size() != model.covariate_names.size())
    fail(ErrorCode::DimensionMismatch, "covariate row length differs from covariate count");
  double s = 0.0;
  for (int c : model.partition.topo_order) s += factor_logpmf(*model.factors[c], counts_row, covariate_row);
  return s;
}

CountDataset sample(const PdagModel& model, std::size_t n, const std::vector<std::vector<double>>& covariate_rows,
                    std::uint64_t seed) {
  const std::size_t k = static_cast<std::size_t>(model.graph.n_vertices());
  const std::size_t nx = model.covariate_names.size();
  if (nx > 0 && covariate_rows.size() != n)
    fail(ErrorCode::DimensionMismatch, "model has covariates: one covariate row per sample required");
  Rng rng(seed);
  std::vector<std::vector<Count>> cols(k, std::vector<Count>(n));
  std::vector<std::vector<double>> xcols(nx, std::vector<double>(n));
  std::vector<Count> row(k);
  const std::vector<double> empty;
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double>& x = nx > 0 ? covariate_rows[i] : empty;
    if (x.size() != nx) fail(ErrorCode::DimensionMismatch, "covariate row arity mismatch");
    std::fill(row.begin(), row.end(), 0);
    for (int c : model.partition.topo_order) {
      const FittedFactor& f = *model.factors[c];
      const std::vector<Count> vals = sample_factor(f, row, x, rng);
      for (std::size_t j = 0; j < f.component.size(); ++j) row[static_cast<std::size_t>(f.component[j])] = vals[j];
    }
    for (std::size_t j = 0; j < k; ++j) cols[j][i] = row[j];
    for (std::size_t j = 0; j < nx; ++j) xcols[j][i] = x[j];
  }
  return CountDataset(model.count_names, std::move(cols), model.covariate_names, std::move(xcols));
}

}  // namespace pdagcount
