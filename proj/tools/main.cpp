#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pdagcount/error.hpp"
#include "pdagcount/io.hpp"
#include "pdagcount/metrics.hpp"
#include "pdagcount/model.hpp"
#include "pdagcount/scoring.hpp"
#include "pdagcount/search.hpp"

using namespace pdagcount;
using nlohmann::json;

namespace {

struct Common {
  std::string data;
  std::vector<std::string> covariates;
  std::string strategy = "hill";
  std::string init = "empty";
  int restarts = 1;
  std::uint64_t seed = 0;
  std::string menu = "default";
  std::string score_mode = "parametric";
  int threads = 1;
  double density = 0.3;
  double mi_threshold = 0.05;
  int mi_permutations = 199;
  double t0 = 10.0;
  double cooling = 0.995;
  int anneal_steps = 2000;
};

void add_data_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--data", c.data, "CSV with a header row")->required();
  cmd->add_option("--covariates", c.covariates, "covariate column names")->delimiter(',');
  cmd->add_option("--menu", c.menu, "family menu tokens, comma separated")->capture_default_str();
  cmd->add_option("--score-mode", c.score_mode, "parametric|nonparametric")->capture_default_str();
}

void add_search_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--strategy", c.strategy, "hill|first|ges|anneal")->capture_default_str();
  cmd->add_option("--init", c.init, "empty|random|moral-mi")->capture_default_str();
  cmd->add_option("--restarts", c.restarts)->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed)->capture_default_str();
  cmd->add_option("--threads", c.threads, "neighbor scoring workers")->capture_default_str();
  cmd->add_option("--density", c.density, "edge density for random init")->capture_default_str();
  cmd->add_option("--mi-threshold", c.mi_threshold)->capture_default_str();
  cmd->add_option("--mi-permutations", c.mi_permutations)->capture_default_str();
  cmd->add_option("--t0", c.t0, "annealing start temperature")->capture_default_str();
  cmd->add_option("--cooling", c.cooling)->capture_default_str();
  cmd->add_option("--anneal-steps", c.anneal_steps)->capture_default_str();
}

SearchConfig search_config(const Common& c) {
  SearchConfig cfg;
  cfg.strategy = parse_strategy(c.strategy);
  cfg.init = parse_init(c.init);
  cfg.restarts = c.restarts;
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  cfg.density = c.density;
  cfg.mi_threshold = c.mi_threshold;
  cfg.mi_permutations = c.mi_permutations;
  cfg.anneal = {c.t0, c.cooling, c.anneal_steps};
  return cfg;
}

FamilyMenu menu_for(const std::string& mode, const std::string& menu_text) {
  if (mode == "parametric") return FamilyMenu::parse(menu_text);
  if (mode == "nonparametric") return FamilyMenu::nonparametric_menu();
  fail(ErrorCode::InvalidArgument, "unknown score mode '" + mode + "'");
}

std::vector<int> covariate_pool(const CountDataset& data) {
  std::vector<int> pool(data.n_covariates());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<int>(i);
  return pool;
}

json factor_summary(const PdagModel& m) {
  json out = json::array();
  for (const auto& f : m.factors) {
    std::vector<std::string> cov;
    for (int k : f->covariates) cov.push_back(m.covariate_names[static_cast<std::size_t>(k)]);
    out.push_back(json{{"component", f->component},
                       {"parents", f->parents},
                       {"covariates", cov},
                       {"family", f->family},
                       {"n_params", f->n_params},
                       {"bic", f->bic}});
  }
  return out;
}

json graph_doc(const Pdag& g, const std::vector<std::string>& names) { return json::parse(graph_to_json(g, names)); }

json cache_doc(const CacheStats& s) {
  return json{{"hits", s.hits}, {"misses", s.misses}, {"fits_performed", s.fits_performed}, {"hit_rate", s.hit_rate}};
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text_file(path, text);
}

int run_fit(const Common& c, const std::string& out_model, const std::string& out_dot, const std::string& out_trace) {
  const CountDataset data = read_csv_file(c.data, c.covariates);
  const FamilyMenu menu = menu_for(c.score_mode, c.menu);
  ScoreCache cache(true);
  const Scorer scorer(data, covariate_pool(data), menu, cache);
  const SearchResult res = run_search(scorer, search_config(c));
  const GraphScore gs = score_graph(data, res.best.final_graph, scorer.covariate_pool(), menu, cache);
  if (!out_model.empty()) write_text_file(out_model, model_to_json(gs.model));
  if (!out_dot.empty()) write_text_file(out_dot, to_dot(gs.model.graph, data.count_names()));
  if (!out_trace.empty()) write_text_file(out_trace, trace_to_jsonl(res.best));
  const json summary{{"score", gs.total_bic},
                     {"strategy", res.best.strategy},
                     {"init", res.best.init},
                     {"best_restart", res.best.restart},
                     {"restart_scores", res.restart_scores},
                     {"n_steps", res.best.steps.size()},
                     {"graph", graph_doc(gs.model.graph, data.count_names())},
                     {"factors", factor_summary(gs.model)},
                     {"cache", cache_doc(res.best.cache)}};
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int run_simulate(const std::string& model_path, std::optional<std::size_t> n, std::uint64_t seed,
                 const std::string& covariate_file, const std::string& out) {
  const PdagModel model = model_from_json(read_text_file(model_path));
  std::vector<std::vector<double>> xrows;
  std::size_t rows = n.value_or(0);
  if (!model.covariate_names.empty()) {
    if (covariate_file.empty()) fail(ErrorCode::InvalidArgument, "model uses covariates: --covariates-file required");
    const CountDataset x = read_csv_file(covariate_file, model.covariate_names);
    if (n && *n != x.n_rows()) fail(ErrorCode::InvalidArgument, "--n differs from the covariate file row count");
    rows = x.n_rows();
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> row;
      for (const auto& name : model.covariate_names) {
        const auto& names = x.covariate_names();
        const auto k = static_cast<std::size_t>(std::find(names.begin(), names.end(), name) - names.begin());
        row.push_back(x.covariate(k)[r]);
      }
      xrows.push_back(std::move(row));
    }
  } else if (!n) {
    fail(ErrorCode::InvalidArgument, "--n required");
  }
  const CountDataset sim = sample(model, rows, xrows, seed);
  std::ostringstream os;
  write_csv(os, sim);
  emit(out, os.str());
  return 0;
}

int run_score(const Common& c, const std::string& graph_path, const std::string& out_model) {
  const CountDataset data = read_csv_file(c.data, c.covariates);
  const FamilyMenu menu = menu_for(c.score_mode, c.menu);
  const Pdag g = graph_from_json(read_text_file(graph_path));
  ScoreCache cache(true);
  const GraphScore gs = score_graph(data, g, covariate_pool(data), menu, cache);
  if (!out_model.empty()) write_text_file(out_model, model_to_json(gs.model));
  const json summary{{"score", gs.total_bic}, {"factors", factor_summary(gs.model)}};
  std::cout << summary.dump(2) << '\n';
  return 0;
}

json benchmark_run(const CountDataset& data, const Pdag& truth, const Common& c, const std::string& mode,
                   bool cache_on, bool timing) {
  const FamilyMenu menu = menu_for(mode, c.menu);
  const std::vector<int> pool = menu.nonparametric ? std::vector<int>{} : covariate_pool(data);
  ScoreCache cache(cache_on);
  const Scorer scorer(data, pool, menu, cache);
  const auto start = std::chrono::steady_clock::now();
  const SearchResult res = run_search(scorer, search_config(c));
  const auto stop = std::chrono::steady_clock::now();
  const CacheStats stats = cache.stats();

  ScoreCache side(true);
  const GraphScore est = score_graph(data, res.best.final_graph, pool, menu, side);
  const Scorer truth_scorer(data, pool, menu, side);
  const double score_true = truth_scorer.score(truth);
  const GraphComparison cmp = compare_graphs(res.best.final_graph, truth);

  int total_params = 0;
  for (const auto& f : est.model.factors) total_params += f->n_params;
  json run{{"score_mode", mode},
           {"cache", cache_on ? "on" : "off"},
           {"shd", cmp.shd},
           {"skeleton_precision", cmp.skeleton_precision},
           {"skeleton_recall", cmp.skeleton_recall},
           {"empty_estimate", cmp.empty_estimate},
           {"empty_truth", cmp.empty_truth},
           {"score_true", score_true},
           {"score_estimated", res.best.final_score},
           {"n_params", total_params},
           {"hits", stats.hits},
           {"misses", stats.misses},
           {"fits_performed", stats.fits_performed},
           {"hit_rate", stats.hit_rate},
           {"graph", graph_doc(res.best.final_graph, data.count_names())},
           {"dot", to_dot(res.best.final_graph, data.count_names())},
           {"factors", factor_summary(est.model)}};
  if (timing) run["wall_time_ms"] = std::chrono::duration<double, std::milli>(stop - start).count();
  return run;
}

int run_benchmark(const Common& c, const std::string& truth_path, const std::string& cache_mode, bool timing,
                  const std::string& out) {
  const CountDataset data = read_csv_file(c.data, c.covariates);
  const Pdag truth = graph_from_json(read_text_file(truth_path));
  if (static_cast<std::size_t>(truth.n_vertices()) != data.n_vars())
    fail(ErrorCode::DimensionMismatch, "truth graph and data differ in number of variables");
  std::vector<std::string> modes;
  if (c.score_mode == "both")
    modes = {"parametric", "nonparametric"};
  else
    modes = {c.score_mode};
  std::vector<bool> caches;
  if (cache_mode == "on")
    caches = {true};
  else if (cache_mode == "off")
    caches = {false};
  else if (cache_mode == "both")
    caches = {true, false};
  else
    fail(ErrorCode::InvalidArgument, "--cache must be on, off or both");

  json runs = json::array();
  for (const auto& mode : modes)
    for (bool on : caches) runs.push_back(benchmark_run(data, truth, c, mode, on, timing));
  const json report{{"strategy", c.strategy},
                    {"init", c.init},
                    {"restarts", c.restarts},
                    {"seed", c.seed},
                    {"truth", graph_doc(truth, data.count_names())},
                    {"runs", runs}};
  emit(out, report.dump(2) + "\n");
  return 0;
}

int exit_code(const Error& e) {
  if (e.code() == ErrorCode::NonConverged) return 3;
  if (is_input_error(e.code())) return 2;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure learning for multivariate count data with chain graph (PDAG) models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pdagcount 0.1.0");

  Common c;
  std::string out_model, out_dot, out_trace, out, graph_path, truth_path, model_path, covariate_file;
  std::string cache_mode = "both";
  bool no_timing = false;
  std::optional<std::size_t> n;
  std::uint64_t sim_seed = 0;

  auto* fit = app.add_subcommand("fit", "learn a PDAG model from data");
  add_data_flags(fit, c);
  add_search_flags(fit, c);
  fit->add_option("--out-model", out_model, "model JSON");
  fit->add_option("--out-dot", out_dot, "graph in DOT format");
  fit->add_option("--out-trace", out_trace, "search trace, JSON lines");

  auto* sim = app.add_subcommand("simulate", "sample a CSV dataset from a model");
  sim->add_option("--model", model_path)->required();
  sim->add_option("--n", n, "number of rows");
  sim->add_option("--seed", sim_seed)->capture_default_str();
  sim->add_option("--covariates-file", covariate_file, "CSV holding the model's covariate columns");
  sim->add_option("--out", out, "output CSV (default stdout)");

  auto* score = app.add_subcommand("score", "fit factors and report the BIC of a fixed graph");
  add_data_flags(score, c);
  score->add_option("--graph", graph_path, "graph or model JSON")->required();
  score->add_option("--out-model", out_model, "model JSON");

  auto* bench = app.add_subcommand("benchmark", "learn, then compare against a known graph");
  add_data_flags(bench, c);
  add_search_flags(bench, c);
  bench->add_option("--truth", truth_path, "true graph or model JSON")->required();
  bench->add_option("--cache", cache_mode, "on|off|both")->capture_default_str();
  bench->add_flag("--no-timing", no_timing, "omit wall times so reports are reproducible");
  bench->add_option("--out", out, "report JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*fit) return run_fit(c, out_model, out_dot, out_trace);
    if (*sim) return run_simulate(model_path, n, sim_seed, covariate_file, out);
    if (*score) return run_score(c, graph_path, out_model);
    if (*bench) return run_benchmark(c, truth_path, cache_mode, !no_timing, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
