#pragma once

#include "pdagcount/pdag.hpp"

namespace pdagcount {

struct GraphComparison {
  // Vertex pairs whose edge state differs. A missing, extra, reversed, or
  // directed-vs-undirected edge each count 1.
  int shd = 0;
  double skeleton_precision = 1.0;
  double skeleton_recall = 1.0;
  // Set when the estimate (precision) or the truth (recall) has no edges;
  // the matching ratio is then reported as 1 by convention.
  bool empty_estimate = false;
  bool empty_truth = false;
};

GraphComparison compare_graphs(const Pdag& estimate, const Pdag& truth);

}  // namespace pdagcount
