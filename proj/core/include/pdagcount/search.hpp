#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdagcount/dataset.hpp"
#include "pdagcount/distributions.hpp"
#include "pdagcount/pdag.hpp"
#include "pdagcount/scoring.hpp"

namespace pdagcount {

enum class OperatorKind { AddDirected, DeleteEdge, ReverseComponentEdges, AbsorbVertex, ExtractVertex };
enum class VertexRole { AsParent, AsChild };

// One PDAG move. Field use by kind:
//   AddDirected(u -> v), DeleteEdge(u, v): u, v
//   ReverseComponentEdges: from_component, to_component
//   AbsorbVertex: u joins to_component, having been its parent or child
//   ExtractVertex: u leaves its component as a parent or child of it
// Members are ordered so that the defaulted comparison sorts by kind first.
struct Operator {
  OperatorKind kind = OperatorKind::AddDirected;
  int u = -1;
  int v = -1;
  std::vector<int> from_component;
  std::vector<int> to_component;
  VertexRole role = VertexRole::AsParent;

  static Operator add_directed(int u, int v);
  static Operator delete_edge(int u, int v);
  static Operator reverse_component_edges(std::vector<int> from, std::vector<int> to);
  static Operator absorb_vertex(int v, std::vector<int> component, VertexRole role);
  static Operator extract_vertex(int v, VertexRole role);

  friend auto operator<=>(const Operator&, const Operator&) = default;
};

std::string describe(const Operator& op);
std::string to_string(OperatorKind kind);

// Throws InadmissibleOperator when a precondition fails or the result would
// contain a partially directed cycle.
Pdag apply_operator(const Pdag& g, const Operator& op);
std::optional<Pdag> try_apply_operator(const Pdag& g, const Operator& op);

// Every admissible operator, sorted.
std::vector<Operator> neighborhood(const Pdag& g);

enum class Strategy { HillClimb, FirstAscent, Greedy, Anneal };
enum class InitKind { Empty, Random, MoralMi };

std::string to_string(Strategy s);
std::string to_string(InitKind k);
Strategy parse_strategy(std::string_view text);
InitKind parse_init(std::string_view text);

struct AnnealSchedule {
  double t0 = 10.0;
  double cooling = 0.995;
  int steps = 2000;
};

struct SearchConfig {
  Strategy strategy = Strategy::HillClimb;
  int restarts = 1;
  std::uint64_t seed = 0;
  AnnealSchedule anneal;
  InitKind init = InitKind::Empty;
  double density = 0.3;
  double undirected_prob = 0.2;
  double mi_threshold = 0.05;
  int mi_permutations = 199;
  // Neighbor scoring workers; results do not depend on this.
  int threads = 1;
  int max_steps = 100000;
};

struct StepRecord {
  Operator op;
  double score_before = 0.0;
  double score_after = 0.0;
  bool accepted = false;
  std::string phase;
  double temperature = 0.0;
  CacheStats cache;
};

struct SearchTrace {
  std::string strategy;
  std::string init;
  int restart = 0;
  std::uint64_t seed = 0;
  Pdag initial_graph;
  double initial_score = 0.0;
  std::vector<StepRecord> steps;
  Pdag final_graph;
  double final_score = 0.0;
  CacheStats cache;
};

SearchTrace hill_climb(const Scorer& scorer, const Pdag& g0, const SearchConfig& config);
SearchTrace first_ascent(const Scorer& scorer, const Pdag& g0, const SearchConfig& config);
// Forward phase (AddDirected, AbsorbVertex) then backward phase (DeleteEdge,
// ExtractVertex) from the empty graph, each to no improvement.
SearchTrace greedy_phases(const Scorer& scorer, const SearchConfig& config);
// Returns the best graph visited.
SearchTrace anneal(const Scorer& scorer, const Pdag& g0, const SearchConfig& config);

// Metropolis rule: always accept delta > 0, else with probability exp(delta / T).
bool anneal_accept(double delta, double temperature, Rng& rng);

Pdag init_random(int n_vertices, double density, std::uint64_t seed, double undirected_prob = 0.2);

// Plug-in mutual information (nats) of the empirical joint of two columns.
double mutual_information(std::span<const Count> a, std::span<const Count> b);

struct MoralGraphEstimate {
  std::vector<Edge> edges;  // from < to
  // p_values[i][j] for i < j; permutation p-value (1 + #exceed) / (1 + B).
  std::vector<std::vector<double>> p_values;
};

MoralGraphEstimate estimate_moral_graph(const CountDataset& data, double threshold, std::uint64_t seed,
                                        int permutations = 199);

// Orients an undirected graph into a valid PDAG using a low-degree-first
// elimination order; only edges of `skeleton` appear in the result.
Pdag orient_moral_graph(int n_vertices, const std::vector<Edge>& skeleton);

Pdag init_moral_mi(const CountDataset& data, double threshold, std::uint64_t seed, int permutations = 199);

struct SearchResult {
  SearchTrace best;
  std::vector<double> restart_scores;
};

// Initialization, strategy and restarts as configured. Best final score wins;
// ties go to fewer edges, then the lexicographically smaller edge set.
SearchResult run_search(const Scorer& scorer, const SearchConfig& config);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace pdagcount
