#include "pdagcount/pdag.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "pdagcount/error.hpp"

namespace pdagcount {
namespace {

std::vector<int> undirected_component_labels(const Pdag& g) {
  const int n = g.n_vertices();
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    std::vector<int> stack{s};
    label[s] = next;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : g.undirected_neighbors(v))
        if (label[w] < 0) {
          label[w] = next;
          stack.push_back(w);
        }
    }
    ++next;
  }
  return label;
}

}  // namespace

Pdag::Pdag(int n_vertices) : n_(n_vertices) {
  if (n_vertices < 0) fail(ErrorCode::InvalidArgument, "negative vertex count");
  marks_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), Mark::None);
}

void Pdag::check_pair(int u, int v) const {
  if (u < 0 || v < 0 || u >= n_ || v >= n_)
    fail(ErrorCode::InvalidArgument, "vertex out of range");
  if (u == v) fail(ErrorCode::InvalidArgument, "self-loop at vertex " + std::to_string(u));
}

Pdag::Mark Pdag::mark(int u, int v) const {
  if (u < 0 || v < 0 || u >= n_ || v >= n_ || u == v) return Mark::None;
  return marks_[static_cast<std::size_t>(u) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v)];
}

void Pdag::set(int u, int v, Mark m) {
  marks_[static_cast<std::size_t>(u) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v)] = m;
}

void Pdag::add_directed(int u, int v) {
  check_pair(u, v);
  if (adjacent(u, v))
    fail(ErrorCode::InvalidArgument, "pair " + std::to_string(u) + "," + std::to_string(v) + " already joined");
  set(u, v, Mark::Out);
  set(v, u, Mark::In);
}

void Pdag::add_undirected(int u, int v) {
  check_pair(u, v);
  if (adjacent(u, v))
    fail(ErrorCode::InvalidArgument, "pair " + std::to_string(u) + "," + std::to_string(v) + " already joined");
  set(u, v, Mark::Undirected);
  set(v, u, Mark::Undirected);
}

void Pdag::remove_edge(int u, int v) {
  check_pair(u, v);
  set(u, v, Mark::None);
  set(v, u, Mark::None);
}

std::vector<Edge> Pdag::directed_edges() const {
  std::vector<Edge> out;
  for (int u = 0; u < n_; ++u)
    for (int v = 0; v < n_; ++v)
      if (mark(u, v) == Mark::Out) out.push_back({u, v});
  return out;
}

std::vector<Edge> Pdag::undirected_edges() const {
  std::vector<Edge> out;
  for (int u = 0; u < n_; ++u)
    for (int v = u + 1; v < n_; ++v)
      if (mark(u, v) == Mark::Undirected) out.push_back({u, v});
  return out;
}

std::size_t Pdag::n_edges() const {
  std::size_t c = 0;
  for (int u = 0; u < n_; ++u)
    for (int v = u + 1; v < n_; ++v)
      if (mark(u, v) != Mark::None) ++c;
  return c;
}

std::vector<int> Pdag::directed_parents(int v) const {
  std::vector<int> out;
  for (int u = 0; u < n_; ++u)
    if (mark(u, v) == Mark::Out) out.push_back(u);
  return out;
}

std::vector<int> Pdag::undirected_neighbors(int v) const {
  std::vector<int> out;
  for (int u = 0; u < n_; ++u)
    if (mark(u, v) == Mark::Undirected) out.push_back(u);
  return out;
}

bool is_valid_pdag(const Pdag& g) {
  const int n = g.n_vertices();
  const std::vector<int> label = undirected_component_labels(g);
  const int nc = n == 0 ? 0 : *std::max_element(label.begin(), label.end()) + 1;
  std::vector<std::set<int>> succ(static_cast<std::size_t>(nc));
  std::vector<int> indeg(static_cast<std::size_t>(nc), 0);
  for (const Edge& e : g.directed_edges()) {
    const int a = label[e.from];
    const int b = label[e.to];
    if (a == b) return false;
    if (succ[a].insert(b).second) ++indeg[b];
  }
  std::vector<int> ready;
  for (int c = 0; c < nc; ++c)
    if (indeg[c] == 0) ready.push_back(c);
  int seen = 0;
  while (!ready.empty()) {
    const int c = ready.back();
    ready.pop_back();
    ++seen;
    for (int d : succ[c])
      if (--indeg[d] == 0) ready.push_back(d);
  }
  return seen == nc;
}

ChainPartition chain_components(const Pdag& g) {
  if (!is_valid_pdag(g)) fail(ErrorCode::InvalidPdag, "graph contains a partially directed cycle");
  const int n = g.n_vertices();
  const std::vector<int> raw = undirected_component_labels(g);

  // Labels are assigned in order of first (smallest) vertex, so they already
  // sort components by their minimum vertex.
  ChainPartition p;
  p.component_of = raw;
  const int nc = n == 0 ? 0 : *std::max_element(raw.begin(), raw.end()) + 1;
  p.components.resize(static_cast<std::size_t>(nc));
  for (int v = 0; v < n; ++v) p.components[raw[v]].push_back(v);

  std::vector<std::set<int>> parents(static_cast<std::size_t>(nc));
  std::vector<std::set<int>> children(static_cast<std::size_t>(nc));
  for (const Edge& e : g.directed_edges()) {
    parents[raw[e.to]].insert(raw[e.from]);
    children[raw[e.from]].insert(raw[e.to]);
  }
  p.component_parents.resize(static_cast<std::size_t>(nc));
  std::vector<int> indeg(static_cast<std::size_t>(nc));
  for (int c = 0; c < nc; ++c) {
    p.component_parents[c].assign(parents[c].begin(), parents[c].end());
    indeg[c] = static_cast<int>(parents[c].size());
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int c = 0; c < nc; ++c)
    if (indeg[c] == 0) ready.push(c);
  while (!ready.empty()) {
    const int c = ready.top();
    ready.pop();
    p.topo_order.push_back(c);
    for (int d : children[c])
      if (--indeg[d] == 0) ready.push(d);
  }
  return p;
}

std::vector<int> parent_vertices(const Pdag& g, const std::vector<int>& component) {
  std::set<int> out;
  for (int v : component)
    for (int u : g.directed_parents(v)) out.insert(u);
  return {out.begin(), out.end()};
}

std::string to_dot(const Pdag& g, const std::vector<std::string>& names) {
  std::ostringstream os;
  os << "digraph pdag {\n";
  for (int v = 0; v < g.n_vertices(); ++v) {
    os << "  " << v;
    if (static_cast<std::size_t>(v) < names.size()) os << " [label=\"" << names[v] << "\"]";
    os << ";\n";
  }
  for (const Edge& e : g.directed_edges()) os << "  " << e.from << " -> " << e.to << ";\n";
  for (const Edge& e : g.undirected_edges()) os << "  " << e.from << " -> " << e.to << " [dir=none];\n";
  os << "}\n";
  return os.str();
}

bool edge_set_less(const Pdag& a, const Pdag& b) {
  const auto da = a.directed_edges();
  const auto db = b.directed_edges();
  if (da != db) return da < db;
  return a.undirected_edges() < b.undirected_edges();
}

}  // namespace pdagcount
