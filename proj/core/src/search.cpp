#include "pdagcount/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "pdagcount/error.hpp"
#include "pdagcount/math.hpp"

namespace pdagcount {
namespace {

bool improves(double candidate, double current) {
  if (!std::isfinite(candidate)) return false;
  if (!std::isfinite(current)) return true;
  return candidate > current + 1e-9 * std::max(1.0, std::abs(current));
}

[[noreturn]] void inadmissible(const std::string& why) { fail(ErrorCode::InadmissibleOperator, why); }

std::string join(const std::vector<int>& ids) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < ids.size(); ++i) os << (i ? "," : "") << ids[i];
  os << '}';
  return os.str();
}

Pdag apply_unchecked(const Pdag& g, const Operator& op) {
  const int n = g.n_vertices();
  auto in_range = [n](int x) { return x >= 0 && x < n; };
  switch (op.kind) {
    case OperatorKind::AddDirected: {
      if (!in_range(op.u) || !in_range(op.v) || op.u == op.v) inadmissible("bad vertices");
      if (g.adjacent(op.u, op.v)) inadmissible("vertices already adjacent");
      const ChainPartition part = chain_components(g);
      if (part.component_of[op.u] == part.component_of[op.v]) inadmissible("vertices share a chain component");
      Pdag out = g;
      out.add_directed(op.u, op.v);
      return out;
    }
    case OperatorKind::DeleteEdge: {
      if (!in_range(op.u) || !in_range(op.v) || op.u == op.v) inadmissible("bad vertices");
      const bool directed = g.has_directed(op.u, op.v);
      const bool undirected = g.has_undirected(op.u, op.v) && op.u < op.v;
      if (!directed && !undirected) inadmissible("no such edge");
      Pdag out = g;
      out.remove_edge(op.u, op.v);
      return out;
    }
    case OperatorKind::ReverseComponentEdges: {
      const ChainPartition part = chain_components(g);
      auto find = [&](const std::vector<int>& comp) {
        if (comp.empty() || !in_range(comp.front())) inadmissible("unknown component");
        const int c = part.component_of[comp.front()];
        if (part.components[c] != comp) inadmissible("not a chain component");
        return c;
      };
      const int a = find(op.from_component);
      const int b = find(op.to_component);
      if (a == b) inadmissible("same component");
      Pdag out = g;
      bool any = false;
      for (int x : op.from_component)
        for (int y : op.to_component)
          if (g.has_directed(x, y)) {
            out.remove_edge(x, y);
            out.add_directed(y, x);
            any = true;
          }
      if (!any) inadmissible("no directed edge between the components");
      return out;
    }
    case OperatorKind::AbsorbVertex: {
      if (!in_range(op.u)) inadmissible("bad vertex");
      const ChainPartition part = chain_components(g);
      const int cv = part.component_of[op.u];
      if (part.components[cv].size() != 1) inadmissible("vertex is not a singleton component");
      if (op.to_component.empty() || !in_range(op.to_component.front())) inadmissible("unknown component");
      const int target = part.component_of[op.to_component.front()];
      if (part.components[target] != op.to_component || target == cv) inadmissible("not a chain component");
      Pdag out = g;
      bool any = false;
      for (int w : op.to_component) {
        if (!g.adjacent(op.u, w)) continue;
        const bool ok = op.role == VertexRole::AsParent ? g.has_directed(op.u, w) : g.has_directed(w, op.u);
        if (!ok) inadmissible("edges to the component are not oriented consistently");
        out.remove_edge(op.u, w);
        out.add_undirected(op.u, w);
        any = true;
      }
      if (!any) inadmissible("vertex not adjacent to the component");
      return out;
    }
    case OperatorKind::ExtractVertex: {
      if (!in_range(op.u)) inadmissible("bad vertex");
      const std::vector<int> nbrs = g.undirected_neighbors(op.u);
      if (nbrs.empty()) inadmissible("vertex is a singleton component");
      Pdag out = g;
      for (int w : nbrs) {
        out.remove_edge(op.u, w);
        if (op.role == VertexRole::AsParent)
          out.add_directed(op.u, w);
        else
          out.add_directed(w, op.u);
      }
      return out;
    }
  }
  inadmissible("unknown operator");
}

std::vector<double> score_all(const Scorer& scorer, const std::vector<Pdag>& graphs, int threads) {
  std::vector<double> scores(graphs.size(), kNegInf);
  if (threads <= 1 || graphs.size() < 2) {
    for (std::size_t i = 0; i < graphs.size(); ++i) scores[i] = scorer.score(graphs[i]);
    return scores;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= graphs.size()) return;
      try {
        scores[i] = scorer.score(graphs[i]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(threads, static_cast<int>(graphs.size()));
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return scores;
}

SearchTrace start_trace(const Scorer& scorer, const Pdag& g0, const SearchConfig& config, Strategy s) {
  if (!is_valid_pdag(g0)) fail(ErrorCode::InvalidPdag, "initial graph is not a valid PDAG");
  SearchTrace t;
  t.strategy = to_string(s);
  t.init = to_string(config.init);
  t.seed = config.seed;
  t.initial_graph = g0;
  t.initial_score = scorer.score(g0);
  t.final_graph = g0;
  t.final_score = t.initial_score;
  return t;
}

bool kind_allowed(OperatorKind k, std::span<const OperatorKind> allowed) {
  return allowed.empty() || std::find(allowed.begin(), allowed.end(), k) != allowed.end();
}

// Best-improvement ascent restricted to `allowed` kinds (empty = all).
void best_improvement(const Scorer& scorer, SearchTrace& t, const SearchConfig& config,
                      std::span<const OperatorKind> allowed, const std::string& phase) {
  Pdag g = t.final_graph;
  double s = t.final_score;
  for (int step = 0; step < config.max_steps; ++step) {
    std::vector<Operator> ops;
    std::vector<Pdag> graphs;
    for (Operator& op : neighborhood(g)) {
      if (!kind_allowed(op.kind, allowed)) continue;
      graphs.push_back(apply_operator(g, op));
      ops.push_back(std::move(op));
    }
    const std::vector<double> scores = score_all(scorer, graphs, config.threads);
    std::size_t best = scores.size();
    for (std::size_t i = 0; i < scores.size(); ++i)
      if (std::isfinite(scores[i]) && (best == scores.size() || scores[i] > scores[best])) best = i;
    if (best == scores.size() || !improves(scores[best], s)) break;
    t.steps.push_back({ops[best], s, scores[best], true, phase, 0.0, scorer.cache().stats()});
    g = std::move(graphs[best]);
    s = scores[best];
  }
  t.final_graph = g;
  t.final_score = s;
}

std::vector<int> dense_codes(std::span<const Count> col, int& levels) {
  std::map<Count, int> index;
  for (Count v : col) index.emplace(v, 0);
  int k = 0;
  for (auto& [v, i] : index) i = k++;
  levels = k;
  std::vector<int> out(col.size());
  for (std::size_t i = 0; i < col.size(); ++i) out[i] = index[col[i]];
  return out;
}

double mi_codes(const std::vector<int>& a, int la, const std::vector<int>& b, int lb) {
  const std::size_t n = a.size();
  if (n == 0) return 0.0;
  std::vector<double> joint(static_cast<std::size_t>(la) * static_cast<std::size_t>(lb), 0.0);
  std::vector<double> ma(static_cast<std::size_t>(la), 0.0), mb(static_cast<std::size_t>(lb), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    joint[static_cast<std::size_t>(a[i]) * static_cast<std::size_t>(lb) + static_cast<std::size_t>(b[i])] += 1.0;
    ma[a[i]] += 1.0;
    mb[b[i]] += 1.0;
  }
  const double nd = static_cast<double>(n);
  double mi = 0.0;
  for (int x = 0; x < la; ++x)
    for (int y = 0; y < lb; ++y) {
      const double c = joint[static_cast<std::size_t>(x) * static_cast<std::size_t>(lb) + static_cast<std::size_t>(y)];
      if (c > 0.0) mi += c / nd * std::log(c * nd / (ma[x] * mb[y]));
    }
  return std::max(mi, 0.0);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Operator Operator::add_directed(int u, int v) {
  Operator op;
  op.kind = OperatorKind::AddDirected;
  op.u = u;
  op.v = v;
  return op;
}

Operator Operator::delete_edge(int u, int v) {
  Operator op;
  op.kind = OperatorKind::DeleteEdge;
  op.u = u;
  op.v = v;
  return op;
}

Operator Operator::reverse_component_edges(std::vector<int> from, std::vector<int> to) {
  Operator op;
  op.kind = OperatorKind::ReverseComponentEdges;
  op.from_component = std::move(from);
  op.to_component = std::move(to);
  return op;
}

Operator Operator::absorb_vertex(int v, std::vector<int> component, VertexRole role) {
  Operator op;
  op.kind = OperatorKind::AbsorbVertex;
  op.u = v;
  op.to_component = std::move(component);
  op.role = role;
  return op;
}

Operator Operator::extract_vertex(int v, VertexRole role) {
  Operator op;
  op.kind = OperatorKind::ExtractVertex;
  op.u = v;
  op.role = role;
  return op;
}

std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::AddDirected: return "AddDirected";
    case OperatorKind::DeleteEdge: return "DeleteEdge";
    case OperatorKind::ReverseComponentEdges: return "ReverseComponentEdges";
    case OperatorKind::AbsorbVertex: return "AbsorbVertex";
    case OperatorKind::ExtractVertex: return "ExtractVertex";
  }
  return "Unknown";
}

std::string describe(const Operator& op) {
  const char* role = op.role == VertexRole::AsParent ? "as_parent" : "as_child";
  std::ostringstream os;
  os << to_string(op.kind) << '(';
  switch (op.kind) {
    case OperatorKind::AddDirected:
    case OperatorKind::DeleteEdge:
      os << op.u << ',' << op.v;
      break;
    case OperatorKind::ReverseComponentEdges:
      os << join(op.from_component) << ',' << join(op.to_component);
      break;
    case OperatorKind::AbsorbVertex:
      os << op.u << ',' << join(op.to_component) << ',' << role;
      break;
    case OperatorKind::ExtractVertex:
      os << op.u << ',' << role;
      break;
  }
  os << ')';
  return os.str();
}

Pdag apply_operator(const Pdag& g, const Operator& op) {
  Pdag out = apply_unchecked(g, op);
  if (!is_valid_pdag(out)) inadmissible(describe(op) + " creates a partially directed cycle");
  return out;
}

std::optional<Pdag> try_apply_operator(const Pdag& g, const Operator& op) {
  try {
    return apply_operator(g, op);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InadmissibleOperator) return std::nullopt;
    throw;
  }
}

std::vector<Operator> neighborhood(const Pdag& g) {
  const ChainPartition part = chain_components(g);
  const int n = g.n_vertices();
  std::vector<Operator> candidates;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v && !g.adjacent(u, v) && part.component_of[u] != part.component_of[v])
        candidates.push_back(Operator::add_directed(u, v));
  for (const Edge& e : g.directed_edges()) candidates.push_back(Operator::delete_edge(e.from, e.to));
  for (const Edge& e : g.undirected_edges()) candidates.push_back(Operator::delete_edge(e.from, e.to));

  std::set<std::pair<int, int>> linked;
  for (const Edge& e : g.directed_edges()) linked.insert({part.component_of[e.from], part.component_of[e.to]});
  for (auto [a, b] : linked)
    candidates.push_back(Operator::reverse_component_edges(part.components[a], part.components[b]));
  for (auto [a, b] : linked) {
    if (part.components[a].size() == 1)
      candidates.push_back(Operator::absorb_vertex(part.components[a].front(), part.components[b], VertexRole::AsParent));
    if (part.components[b].size() == 1)
      candidates.push_back(Operator::absorb_vertex(part.components[b].front(), part.components[a], VertexRole::AsChild));
  }
  for (const auto& comp : part.components) {
    if (comp.size() < 2) continue;
    for (int v : comp) {
      candidates.push_back(Operator::extract_vertex(v, VertexRole::AsParent));
      candidates.push_back(Operator::extract_vertex(v, VertexRole::AsChild));
    }
  }
  std::vector<Operator> out;
  for (Operator& op : candidates)
    if (try_apply_operator(g, op)) out.push_back(std::move(op));
  std::sort(out.begin(), out.end());
  return out;
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::HillClimb: return "hill";
    case Strategy::FirstAscent: return "first";
    case Strategy::Greedy: return "ges";
    case Strategy::Anneal: return "anneal";
  }
  return "unknown";
}

std::string to_string(InitKind k) {
  switch (k) {
    case InitKind::Empty: return "empty";
    case InitKind::Random: return "random";
    case InitKind::MoralMi: return "moral-mi";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "hill") return Strategy::HillClimb;
  if (text == "first") return Strategy::FirstAscent;
  if (text == "ges" || text == "greedy") return Strategy::Greedy;
  if (text == "anneal") return Strategy::Anneal;
  fail(ErrorCode::InvalidArgument, "unknown strategy '" + std::string(text) + "'");
}

InitKind parse_init(std::string_view text) {
  if (text == "empty") return InitKind::Empty;
  if (text == "random") return InitKind::Random;
  if (text == "moral-mi") return InitKind::MoralMi;
  fail(ErrorCode::InvalidArgument, "unknown init '" + std::string(text) + "'");
}

SearchTrace hill_climb(const Scorer& scorer, const Pdag& g0, const SearchConfig& config) {
  SearchTrace t = start_trace(scorer, g0, config, Strategy::HillClimb);
  best_improvement(scorer, t, config, {}, "hill");
  t.cache = scorer.cache().stats();
  return t;
}

SearchTrace first_ascent(const Scorer& scorer, const Pdag& g0, const SearchConfig& config) {
  SearchTrace t = start_trace(scorer, g0, config, Strategy::FirstAscent);
  Rng rng(config.seed);
  Pdag g = g0;
  double s = t.initial_score;
  for (int step = 0; step < config.max_steps; ++step) {
    std::vector<Operator> ops = neighborhood(g);
    std::shuffle(ops.begin(), ops.end(), rng);
    bool moved = false;
    for (const Operator& op : ops) {
      Pdag cand = apply_operator(g, op);
      const double sc = scorer.score(cand);
      if (improves(sc, s)) {
        t.steps.push_back({op, s, sc, true, "first", 0.0, scorer.cache().stats()});
        g = std::move(cand);
        s = sc;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  t.final_graph = g;
  t.final_score = s;
  t.cache = scorer.cache().stats();
  return t;
}

SearchTrace greedy_phases(const Scorer& scorer, const SearchConfig& config) {
  const Pdag empty(static_cast<int>(scorer.data().n_vars()));
  SearchTrace t = start_trace(scorer, empty, config, Strategy::Greedy);
  t.init = "empty";
  const OperatorKind forward[] = {OperatorKind::AddDirected, OperatorKind::AbsorbVertex};
  const OperatorKind backward[] = {OperatorKind::DeleteEdge, OperatorKind::ExtractVertex};
  best_improvement(scorer, t, config, forward, "forward");
  best_improvement(scorer, t, config, backward, "backward");
  t.cache = scorer.cache().stats();
  return t;
}

bool anneal_accept(double delta, double temperature, Rng& rng) {
  if (delta > 0.0) return true;
  if (std::isnan(delta)) return false;
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return u < std::exp(delta / temperature);
}

SearchTrace anneal(const Scorer& scorer, const Pdag& g0, const SearchConfig& config) {
  const AnnealSchedule& sch = config.anneal;
  if (!(sch.t0 > 0.0)) fail(ErrorCode::InvalidArgument, "annealing t0 must be positive");
  if (!(sch.cooling > 0.0 && sch.cooling < 1.0)) fail(ErrorCode::InvalidArgument, "cooling must be in (0,1)");
  SearchTrace t = start_trace(scorer, g0, config, Strategy::Anneal);
  Rng rng(config.seed);
  Pdag g = g0;
  double s = t.initial_score;
  Pdag best = g;
  double best_score = s;
  double temp = sch.t0;
  for (int step = 0; step < sch.steps; ++step) {
    const std::vector<Operator> ops = neighborhood(g);
    if (ops.empty()) break;
    const std::size_t pick = std::uniform_int_distribution<std::size_t>(0, ops.size() - 1)(rng);
    Pdag cand = apply_operator(g, ops[pick]);
    const double sc = scorer.score(cand);
    const double delta = std::isfinite(s) ? sc - s : (std::isfinite(sc) ? 1.0 : kNegInf);
    const bool accepted = std::isfinite(sc) && anneal_accept(delta, temp, rng);
    t.steps.push_back({ops[pick], s, sc, accepted, "anneal", temp, scorer.cache().stats()});
    if (accepted) {
      g = std::move(cand);
      s = sc;
      if (s > best_score || (s == best_score && g.n_edges() < best.n_edges())) {
        best = g;
        best_score = s;
      }
    }
    temp *= sch.cooling;
  }
  t.final_graph = best;
  t.final_score = best_score;
  t.cache = scorer.cache().stats();
  return t;
}

Pdag init_random(int n_vertices, double density, std::uint64_t seed, double undirected_prob) {
  if (n_vertices < 1) fail(ErrorCode::InvalidArgument, "need at least one vertex");
  if (!(density >= 0.0 && density <= 1.0)) fail(ErrorCode::InvalidArgument, "density must be in [0,1]");
  Rng rng(seed);
  std::vector<int> order(static_cast<std::size_t>(n_vertices));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution include(density);
  Pdag g(n_vertices);
  for (int i = 0; i < n_vertices; ++i)
    for (int j = i + 1; j < n_vertices; ++j)
      if (include(rng)) g.add_directed(order[i], order[j]);
  std::bernoulli_distribution convert(undirected_prob);
  for (const Edge& e : g.directed_edges()) {
    if (!convert(rng)) continue;
    Pdag trial = g;
    trial.remove_edge(e.from, e.to);
    trial.add_undirected(e.from, e.to);
    if (is_valid_pdag(trial)) g = std::move(trial);
  }
  return g;
}

double mutual_information(std::span<const Count> a, std::span<const Count> b) {
  if (a.size() != b.size()) fail(ErrorCode::DimensionMismatch, "columns differ in length");
  int la = 0, lb = 0;
  const auto ca = dense_codes(a, la);
  const auto cb = dense_codes(b, lb);
  return mi_codes(ca, la, cb, lb);
}

MoralGraphEstimate estimate_moral_graph(const CountDataset& data, double threshold, std::uint64_t seed,
                                        int permutations) {
  if (data.n_rows() == 0) fail(ErrorCode::EmptyData, "dataset has no rows");
  if (!(threshold > 0.0 && threshold < 1.0)) fail(ErrorCode::InvalidArgument, "threshold must be in (0,1)");
  if (permutations < 1) fail(ErrorCode::InvalidArgument, "need at least one permutation");
  const int k = static_cast<int>(data.n_vars());
  std::vector<std::vector<int>> codes(static_cast<std::size_t>(k));
  std::vector<int> levels(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) codes[j] = dense_codes(data.column(static_cast<std::size_t>(j)), levels[j]);

  MoralGraphEstimate est;
  est.p_values.assign(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), 1.0));
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      const double observed = mi_codes(codes[i], levels[i], codes[j], levels[j]);
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i) * 1000003ULL + static_cast<std::uint64_t>(j)));
      std::vector<int> shuffled = codes[j];
      int exceed = 0;
      for (int b = 0; b < permutations; ++b) {
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        if (mi_codes(codes[i], levels[i], shuffled, levels[j]) >= observed - 1e-12) ++exceed;
      }
      const double p = (1.0 + exceed) / (1.0 + permutations);
      est.p_values[i][j] = est.p_values[j][i] = p;
      if (p <= threshold) est.edges.push_back({i, j});
    }
  return est;
}

Pdag orient_moral_graph(int n_vertices, const std::vector<Edge>& skeleton) {
  std::vector<std::set<int>> adj(static_cast<std::size_t>(n_vertices));
  for (const Edge& e : skeleton) {
    adj[e.from].insert(e.to);
    adj[e.to].insert(e.from);
  }
  std::vector<int> degree(static_cast<std::size_t>(n_vertices));
  for (int v = 0; v < n_vertices; ++v) degree[v] = static_cast<int>(adj[v].size());

  // Low-degree-first elimination; ties to the lowest id.
  std::vector<int> eliminated_at(static_cast<std::size_t>(n_vertices), -1);
  auto remaining = adj;
  for (int step = 0; step < n_vertices; ++step) {
    int pick = -1;
    for (int v = 0; v < n_vertices; ++v)
      if (eliminated_at[v] < 0 && (pick < 0 || remaining[v].size() < remaining[pick].size())) pick = v;
    eliminated_at[pick] = step;
    for (int w : remaining[pick]) remaining[w].erase(pick);
    remaining[pick].clear();
  }

  // Edges point from the later-eliminated endpoint to the earlier one; equal
  // degrees leave the edge undirected.
  Pdag g(n_vertices);
  for (const Edge& e : skeleton) {
    const int a = e.from, b = e.to;
    if (degree[a] == degree[b])
      g.add_undirected(a, b);
    else if (eliminated_at[a] > eliminated_at[b])
      g.add_directed(a, b);
    else
      g.add_directed(b, a);
  }

  // Repair: orient every undirected edge of an offending component along the
  // elimination order until no partially directed cycle remains.
  while (!is_valid_pdag(g)) {
    std::vector<int> label(static_cast<std::size_t>(n_vertices), -1);
    int nc = 0;
    for (int s = 0; s < n_vertices; ++s) {
      if (label[s] >= 0) continue;
      std::vector<int> stack{s};
      label[s] = nc;
      while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int w : g.undirected_neighbors(v))
          if (label[w] < 0) {
            label[w] = nc;
            stack.push_back(w);
          }
      }
      ++nc;
    }
    // Components reachable from themselves through the contracted graph, or
    // holding an internal directed edge.
    std::vector<std::set<int>> succ(static_cast<std::size_t>(nc));
    std::vector<bool> bad(static_cast<std::size_t>(nc), false);
    for (const Edge& e : g.directed_edges()) {
      if (label[e.from] == label[e.to])
        bad[label[e.from]] = true;
      else
        succ[label[e.from]].insert(label[e.to]);
    }
    for (int c = 0; c < nc; ++c) {
      std::vector<bool> seen(static_cast<std::size_t>(nc), false);
      std::vector<int> stack(succ[c].begin(), succ[c].end());
      while (!stack.empty()) {
        const int d = stack.back();
        stack.pop_back();
        if (d == c) {
          bad[c] = true;
          break;
        }
        if (seen[d]) continue;
        seen[d] = true;
        for (int x : succ[d]) stack.push_back(x);
      }
    }
    bool changed = false;
    for (const Edge& e : g.undirected_edges()) {
      if (!bad[label[e.from]]) continue;
      g.remove_edge(e.from, e.to);
      if (eliminated_at[e.from] > eliminated_at[e.to])
        g.add_directed(e.from, e.to);
      else
        g.add_directed(e.to, e.from);
      changed = true;
    }
    if (!changed) fail(ErrorCode::InvalidPdag, "orientation repair made no progress");
  }
  return g;
}

Pdag init_moral_mi(const CountDataset& data, double threshold, std::uint64_t seed, int permutations) {
  const MoralGraphEstimate est = estimate_moral_graph(data, threshold, seed, permutations);
  return orient_moral_graph(static_cast<int>(data.n_vars()), est.edges);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

SearchResult run_search(const Scorer& scorer, const SearchConfig& config) {
  if (config.restarts < 1) fail(ErrorCode::InvalidArgument, "restarts must be >= 1");
  const int k = static_cast<int>(scorer.data().n_vars());
  SearchResult result;
  std::optional<SearchTrace> best;
  for (int r = 0; r < config.restarts; ++r) {
    SearchConfig cfg = config;
    cfg.seed = config.restarts == 1 ? config.seed : derive_seed(config.seed, static_cast<std::uint64_t>(r));
    Pdag g0(k);
    switch (cfg.init) {
      case InitKind::Empty:
        break;
      case InitKind::Random:
        g0 = init_random(k, cfg.density, derive_seed(cfg.seed, 1), cfg.undirected_prob);
        break;
      case InitKind::MoralMi:
        g0 = init_moral_mi(scorer.data(), cfg.mi_threshold, derive_seed(cfg.seed, 2), cfg.mi_permutations);
        break;
    }
    SearchTrace t;
    switch (cfg.strategy) {
      case Strategy::HillClimb: t = hill_climb(scorer, g0, cfg); break;
      case Strategy::FirstAscent: t = first_ascent(scorer, g0, cfg); break;
      case Strategy::Greedy: t = greedy_phases(scorer, cfg); break;
      case Strategy::Anneal: t = anneal(scorer, g0, cfg); break;
    }
    t.restart = r;
    result.restart_scores.push_back(t.final_score);
    const bool better = !best || t.final_score > best->final_score ||
                        (t.final_score == best->final_score &&
                         (t.final_graph.n_edges() < best->final_graph.n_edges() ||
                          (t.final_graph.n_edges() == best->final_graph.n_edges() &&
                           edge_set_less(t.final_graph, best->final_graph))));
    if (better) best = std::move(t);
  }
  result.best = std::move(*best);
  result.best.cache = scorer.cache().stats();
  return result;
}

}  // namespace pdagcount
