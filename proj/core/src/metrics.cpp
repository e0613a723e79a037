#include "pdagcount/metrics.hpp"

#include "pdagcount/error.hpp"

namespace pdagcount {
namespace {

enum class PairState { None, Forward, Backward, Undirected };

PairState state(const Pdag& g, int u, int v) {
  if (g.has_undirected(u, v)) return PairState::Undirected;
  if (g.has_directed(u, v)) return PairState::Forward;
  if (g.has_directed(v, u)) return PairState::Backward;
  return PairState::None;
}

}  // namespace

GraphComparison compare_graphs(const Pdag& estimate, const Pdag& truth) {
  if (estimate.n_vertices() != truth.n_vertices())
    fail(ErrorCode::DimensionMismatch, "graphs have different vertex counts");
  GraphComparison out;
  int est_edges = 0, true_edges = 0, shared = 0;
  const int n = truth.n_vertices();
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      const PairState a = state(estimate, u, v);
      const PairState b = state(truth, u, v);
      if (a != b) ++out.shd;
      est_edges += a != PairState::None;
      true_edges += b != PairState::None;
      shared += a != PairState::None && b != PairState::None;
    }
  out.empty_estimate = est_edges == 0;
  out.empty_truth = true_edges == 0;
  if (est_edges > 0) out.skeleton_precision = static_cast<double>(shared) / est_edges;
  if (true_edges > 0) out.skeleton_recall = static_cast<double>(shared) / true_edges;
  return out;
}

}  // namespace pdagcount
