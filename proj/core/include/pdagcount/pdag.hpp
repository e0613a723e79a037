#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace pdagcount {

struct Edge {
  int from = 0;
  int to = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Partially directed graph on vertices 0..K-1. Each unordered pair carries at
// most one edge: none, u -> v, v -> u or u - v. No self-loops.
class Pdag {
 public:
  explicit Pdag(int n_vertices = 0);

  int n_vertices() const noexcept { return n_; }

  bool has_directed(int u, int v) const { return mark(u, v) == Mark::Out; }
  bool has_undirected(int u, int v) const { return mark(u, v) == Mark::Undirected; }
  bool adjacent(int u, int v) const { return mark(u, v) != Mark::None; }

  void add_directed(int u, int v);
  void add_undirected(int u, int v);
  // Removes whatever edge joins u and v; no-op if none.
  void remove_edge(int u, int v);

  // Sorted by (from, to).
  std::vector<Edge> directed_edges() const;
  // Sorted, from < to.
  std::vector<Edge> undirected_edges() const;
  std::size_t n_edges() const;

  // Directed predecessors u -> v, sorted.
  std::vector<int> directed_parents(int v) const;
  std::vector<int> undirected_neighbors(int v) const;

  friend bool operator==(const Pdag& a, const Pdag& b) { return a.n_ == b.n_ && a.marks_ == b.marks_; }

 private:
  enum class Mark : std::uint8_t { None = 0, Out = 1, In = 2, Undirected = 3 };

  Mark mark(int u, int v) const;
  void check_pair(int u, int v) const;
  void set(int u, int v, Mark m);

  int n_ = 0;
  std::vector<Mark> marks_;
};

// Chain components: connected components of the undirected-edge subgraph,
// ordered by their smallest vertex. Parents are component indices.
struct ChainPartition {
  std::vector<std::vector<int>> components;
  std::vector<int> component_of;
  std::vector<std::vector<int>> component_parents;
  std::vector<int> topo_order;
};

// No partially directed cycle: contracting every chain component leaves an
// acyclic directed graph and no directed edge joins two vertices of the same
// component.
bool is_valid_pdag(const Pdag& g);

// Kahn's procedure on the component DAG, lowest component index first.
ChainPartition chain_components(const Pdag& g);

// Vertices u with u -> v for some v in `component`; sorted.
std::vector<int> parent_vertices(const Pdag& g, const std::vector<int>& component);

// `u -> v` for directed edges and `u -> v [dir=none]` for undirected ones,
// both in sorted order.
std::string to_dot(const Pdag& g, const std::vector<std::string>& names = {});

// Lexicographic order on (directed edges, undirected edges) for tie-breaking.
bool edge_set_less(const Pdag& a, const Pdag& b);

}  // namespace pdagcount
