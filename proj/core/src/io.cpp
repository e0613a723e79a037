#include "pdagcount/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pdagcount/error.hpp"

namespace pdagcount {
namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// ---- CSV ----

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string where(std::size_t line, std::size_t col, const std::string& name) {
  return "line " + std::to_string(line) + ", column " + std::to_string(col) + " ('" + name + "')";
}

bool is_missing(std::string_view f) { return f.empty() || f == "NA" || f == "na" || f == "NaN" || f == "nan"; }

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// ---- JSON helpers ----

template <class T>
T get(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::FormatError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::FormatError, std::string("field '") + key + "': " + e.what());
  }
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::FormatError, std::string("missing field '") + key + "'");
  return j.at(key);
}

json base_to_json(const BaseParams& p) {
  return std::visit(Overloaded{
                        [](const PoissonParams& q) { return json{{"family", "poisson"}, {"lambda", q.lambda}}; },
                        [](const BinomialParams& q) {
                          return json{{"family", "binomial"}, {"trials", q.trials}, {"prob", q.prob}};
                        },
                        [](const NegBinParams& q) {
                          return json{{"family", "negbin"}, {"size", q.size}, {"prob", q.prob}};
                        },
                    },
                    p);
}

BaseParams base_from_json(const json& j) {
  const auto fam = get<std::string>(j, "family");
  if (fam == "poisson") return PoissonParams{get<double>(j, "lambda")};
  if (fam == "binomial") return BinomialParams{get<Count>(j, "trials"), get<double>(j, "prob")};
  if (fam == "negbin") return NegBinParams{get<double>(j, "size"), get<double>(j, "prob")};
  fail(ErrorCode::FormatError, "unknown base family '" + fam + "'");
}

json params_to_json(const Params& p) {
  return std::visit(Overloaded{
                        [](const PoissonParams& q) { return base_to_json(q); },
                        [](const BinomialParams& q) { return base_to_json(q); },
                        [](const NegBinParams& q) { return base_to_json(q); },
                        [](const MixtureParams& q) {
                          json comps = json::array();
                          for (const auto& c : q.components) comps.push_back(base_to_json(c));
                          return json{{"family", "mixture"}, {"weights", q.weights}, {"components", comps}};
                        },
                        [](const MultinomialSplitParams& q) {
                          return json{{"family", "multinomial-split"},
                                      {"total", base_to_json(q.total)},
                                      {"proportions", q.proportions}};
                        },
                        [](const MvPoissonParams& q) {
                          return json{{"family", "mv-poisson"}, {"lambda0", q.lambda0}, {"lambdas", q.lambdas}};
                        },
                    },
                    p);
}

Params params_from_json(const json& j) {
  const auto fam = get<std::string>(j, "family");
  if (fam == "mixture") {
    MixtureParams m;
    m.weights = get<std::vector<double>>(j, "weights");
    for (const json& c : field(j, "components")) m.components.push_back(base_from_json(c));
    if (m.weights.size() != m.components.size() || m.components.empty())
      fail(ErrorCode::FormatError, "mixture weights and components differ in length");
    return m;
  }
  if (fam == "multinomial-split")
    return MultinomialSplitParams{base_from_json(field(j, "total")), get<std::vector<double>>(j, "proportions")};
  if (fam == "mv-poisson") return MvPoissonParams{get<double>(j, "lambda0"), get<std::vector<double>>(j, "lambdas")};
  return std::visit([](const auto& b) -> Params { return b; }, base_from_json(j));
}

json fit_to_json(const FitResult& f) {
  return json{{"params", params_to_json(f.params)}, {"loglik", f.loglik},         {"n_params", f.n_params},
              {"n_obs", f.n_obs},                   {"bic", f.bic},               {"degenerate", f.degenerate},
              {"converged", f.converged}};
}

FitResult fit_from_json(const json& j) {
  FitResult f;
  f.params = params_from_json(field(j, "params"));
  f.loglik = get<double>(j, "loglik");
  f.n_params = get<int>(j, "n_params");
  f.n_obs = get<std::size_t>(j, "n_obs");
  f.bic = get<double>(j, "bic");
  f.degenerate = get<bool>(j, "degenerate");
  f.converged = get<bool>(j, "converged");
  return f;
}

GlmFamily glm_family_from(const std::string& s) {
  for (GlmFamily f : {GlmFamily::PoissonLog, GlmFamily::NegBinLog, GlmFamily::BinomialLogit})
    if (family_name(f) == s) return f;
  fail(ErrorCode::FormatError, "unknown GLM family '" + s + "'");
}

json glm_to_json(const GlmFit& g) {
  std::vector<double> coef(g.coefficients.data(), g.coefficients.data() + g.coefficients.size());
  json j{{"family", family_name(g.family)}, {"coefficients", coef}, {"trials", g.trials},
         {"loglik", g.loglik},              {"n_params", g.n_params}, {"n_obs", g.n_obs}};
  j["dispersion"] = g.dispersion ? json(*g.dispersion) : json(nullptr);
  return j;
}

GlmFit glm_from_json(const json& j) {
  GlmFit g;
  g.family = glm_family_from(get<std::string>(j, "family"));
  const auto coef = get<std::vector<double>>(j, "coefficients");
  g.coefficients = Eigen::Map<const Eigen::VectorXd>(coef.data(), static_cast<Eigen::Index>(coef.size()));
  g.trials = get<Count>(j, "trials");
  g.loglik = get<double>(j, "loglik");
  g.n_params = get<int>(j, "n_params");
  g.n_obs = get<std::size_t>(j, "n_obs");
  const json& d = field(j, "dispersion");
  if (!d.is_null()) g.dispersion = d.get<double>();
  return g;
}

json table_to_json(const std::map<FrequencyTable::Cell, double>& t) {
  json out = json::array();
  for (const auto& [cell, p] : t) out.push_back(json{{"cell", cell}, {"prob", p}});
  return out;
}

std::map<FrequencyTable::Cell, double> table_from_json(const json& j) {
  std::map<FrequencyTable::Cell, double> out;
  for (const json& e : j) out[get<FrequencyTable::Cell>(e, "cell")] = get<double>(e, "prob");
  return out;
}

json model_payload(const FactorModel& m) {
  return std::visit(
      Overloaded{
          [](const FitResult& f) {
            json j = fit_to_json(f);
            j["kind"] = "marginal";
            return j;
          },
          [](const IndependentMarginals& f) {
            json per = json::array();
            for (const auto& x : f.per_vertex) per.push_back(fit_to_json(x));
            return json{{"kind", "independent-marginals"}, {"per_vertex", per}};
          },
          [](const GlmFit& g) {
            json j = glm_to_json(g);
            j["kind"] = "glm";
            return j;
          },
          [](const MultinomialLogitFit& f) {
            json rows = json::array();
            for (Eigen::Index r = 0; r < f.coefficients.rows(); ++r) {
              std::vector<double> row(static_cast<std::size_t>(f.coefficients.cols()));
              for (Eigen::Index c = 0; c < f.coefficients.cols(); ++c) row[static_cast<std::size_t>(c)] = f.coefficients(r, c);
              rows.push_back(row);
            }
            return json{{"kind", "multinomial-logit"}, {"coefficients", rows}, {"total", glm_to_json(f.total_glm)},
                        {"loglik", f.loglik},          {"n_params", f.n_params}, {"n_obs", f.n_obs}};
          },
          [](const IndependentGlms& f) {
            json per = json::array();
            for (const auto& g : f.per_vertex) per.push_back(glm_to_json(g));
            return json{{"kind", "independent-glms"}, {"per_vertex", per}};
          },
          [](const FrequencyTable& t) {
            json cond = json::array();
            for (const auto& [cfg, table] : t.conditional)
              cond.push_back(json{{"parents", cfg}, {"table", table_to_json(table)}});
            return json{{"kind", "frequency-table"}, {"conditional", cond}, {"pooled", table_to_json(t.pooled)}};
          },
      },
      m);
}

FactorModel model_payload_from(const json& j) {
  const auto kind = get<std::string>(j, "kind");
  if (kind == "marginal") return fit_from_json(j);
  if (kind == "independent-marginals") {
    IndependentMarginals m;
    for (const json& x : field(j, "per_vertex")) m.per_vertex.push_back(fit_from_json(x));
    return m;
  }
  if (kind == "glm") return glm_from_json(j);
  if (kind == "multinomial-logit") {
    MultinomialLogitFit f;
    const auto rows = get<std::vector<std::vector<double>>>(j, "coefficients");
    const std::size_t p = rows.empty() ? 0 : rows.front().size();
    f.coefficients.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != p) fail(ErrorCode::FormatError, "ragged coefficient matrix");
      for (std::size_t c = 0; c < p; ++c)
        f.coefficients(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    f.total_glm = glm_from_json(field(j, "total"));
    f.loglik = get<double>(j, "loglik");
    f.n_params = get<int>(j, "n_params");
    f.n_obs = get<std::size_t>(j, "n_obs");
    return f;
  }
  if (kind == "independent-glms") {
    IndependentGlms m;
    for (const json& x : field(j, "per_vertex")) m.per_vertex.push_back(glm_from_json(x));
    return m;
  }
  if (kind == "frequency-table") {
    FrequencyTable t;
    for (const json& e : field(j, "conditional"))
      t.conditional[get<FrequencyTable::Cell>(e, "parents")] = table_from_json(field(e, "table"));
    t.pooled = table_from_json(field(j, "pooled"));
    return t;
  }
  fail(ErrorCode::FormatError, "unknown factor kind '" + kind + "'");
}

json edge_list(const std::vector<Edge>& edges) {
  json out = json::array();
  for (const Edge& e : edges) out.push_back(json::array({e.from, e.to}));
  return out;
}

json graph_json(const Pdag& g, const std::vector<std::string>& names) {
  json j{{"n_vertices", g.n_vertices()},
         {"directed", edge_list(g.directed_edges())},
         {"undirected", edge_list(g.undirected_edges())}};
  if (!names.empty()) j["names"] = names;
  return j;
}

Pdag graph_from(const json& j) {
  const int n = get<int>(j, "n_vertices");
  if (n < 0) fail(ErrorCode::FormatError, "negative vertex count");
  Pdag g(n);
  auto edges = [&](const char* key, bool directed) {
    for (const json& e : field(j, key)) {
      if (!e.is_array() || e.size() != 2) fail(ErrorCode::FormatError, "edge must be a pair");
      const int u = e[0].get<int>(), v = e[1].get<int>();
      if (u < 0 || v < 0 || u >= n || v >= n) fail(ErrorCode::FormatError, "edge endpoint out of range");
      try {
        if (directed)
          g.add_directed(u, v);
        else
          g.add_undirected(u, v);
      } catch (const Error& err) {
        fail(ErrorCode::InvalidPdag, err.what());
      }
    }
  };
  edges("directed", true);
  edges("undirected", false);
  if (!is_valid_pdag(g)) fail(ErrorCode::InvalidPdag, "graph contains a partially directed cycle");
  return g;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    fail(ErrorCode::FormatError, std::string("malformed JSON: ") + e.what());
  }
}

json cache_json(const CacheStats& s) {
  return json{{"hits", s.hits}, {"misses", s.misses}, {"fits_performed", s.fits_performed}, {"hit_rate", s.hit_rate}};
}

}  // namespace

CountDataset read_csv(std::istream& in, const std::vector<std::string>& covariates) {
  std::string line;
  std::size_t line_no = 0;
  // Skip leading blank lines before the header.
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) fail(ErrorCode::FormatError, "missing header row");
  std::vector<std::string> header;
  for (auto f : split_fields(line)) {
    if (f.empty()) fail(ErrorCode::FormatError, "empty column name in header");
    header.emplace_back(f);
  }
  const std::set<std::string> unique(header.begin(), header.end());
  if (unique.size() != header.size()) fail(ErrorCode::FormatError, "duplicate column name in header");
  const std::set<std::string> cov_set(covariates.begin(), covariates.end());
  for (const auto& c : covariates)
    if (!unique.count(c)) fail(ErrorCode::InvalidArgument, "covariate column '" + c + "' not in header");

  std::vector<std::string> count_names, cov_names;
  std::vector<int> slot(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (cov_set.count(header[i])) {
      slot[i] = -1 - static_cast<int>(cov_names.size());
      cov_names.push_back(header[i]);
    } else {
      slot[i] = static_cast<int>(count_names.size());
      count_names.push_back(header[i]);
    }
  }
  std::vector<std::vector<Count>> counts(count_names.size());
  std::vector<std::vector<double>> covs(cov_names.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      fail(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                                       " fields, found " + std::to_string(fields.size()));
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const std::string_view f = fields[i];
      const std::string loc = where(line_no, i + 1, header[i]);
      if (is_missing(f)) fail(ErrorCode::MissingValue, "missing value at " + loc);
      const char* b = f.data();
      const char* e = f.data() + f.size();
      if (slot[i] >= 0) {
        Count v = 0;
        const char* p = b;
        if (*p == '+') ++p;
        const auto res = std::from_chars(p, e, v);
        if (res.ec != std::errc() || res.ptr != e)
          fail(ErrorCode::ParseError, "not an integer count '" + std::string(f) + "' at " + loc);
        if (v < 0) fail(ErrorCode::NegativeCount, "negative count " + std::string(f) + " at " + loc);
        counts[static_cast<std::size_t>(slot[i])].push_back(v);
      } else {
        double v = 0.0;
        const char* p = b;
        if (*p == '+') ++p;
        const auto res = std::from_chars(p, e, v);
        if (res.ec != std::errc() || res.ptr != e || !std::isfinite(v))
          fail(ErrorCode::ParseError, "not a finite real '" + std::string(f) + "' at " + loc);
        covs[static_cast<std::size_t>(-1 - slot[i])].push_back(v);
      }
    }
  }
  return CountDataset(std::move(count_names), std::move(counts), std::move(cov_names), std::move(covs));
}

CountDataset read_csv_file(const std::filesystem::path& path, const std::vector<std::string>& covariates) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return read_csv(in, covariates);
}

void write_csv(std::ostream& out, const CountDataset& data) {
  std::string sep;
  for (const auto& n : data.count_names()) out << std::exchange(sep, ",") << n;
  for (const auto& n : data.covariate_names()) out << std::exchange(sep, ",") << n;
  out << '\n';
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    sep.clear();
    for (std::size_t v = 0; v < data.n_vars(); ++v) out << std::exchange(sep, ",") << data.at(r, v);
    for (std::size_t k = 0; k < data.n_covariates(); ++k)
      out << std::exchange(sep, ",") << format_double(data.covariate(k)[r]);
    out << '\n';
  }
}

std::string model_to_json(const PdagModel& model) {
  json factors = json::array();
  for (const auto& fp : model.factors) {
    const FittedFactor& f = *fp;
    std::vector<std::string> cov;
    for (int k : f.covariates) cov.push_back(model.covariate_names.at(static_cast<std::size_t>(k)));
    factors.push_back(json{{"component", f.component},
                           {"parents", f.parents},
                           {"covariates", cov},
                           {"encoding", f.encoding == ParentEncoding::Log1p ? "log1p" : "identity"},
                           {"family", f.family},
                           {"loglik", f.loglik},
                           {"n_params", f.n_params},
                           {"n_obs", f.n_obs},
                           {"bic", f.bic},
                           {"model", model_payload(f.model)}});
  }
  json j{{"format", "pdagcount-model"},
         {"version", 1},
         {"count_names", model.count_names},
         {"covariate_names", model.covariate_names},
         {"graph", graph_json(model.graph, {})},
         {"total_bic", model.total_bic()},
         {"factors", factors}};
  return j.dump(2) + "\n";
}

PdagModel model_from_json(std::string_view text) {
  const json j = parse_json(text);
  if (get<std::string>(j, "format") != "pdagcount-model") fail(ErrorCode::FormatError, "not a model document");
  if (get<int>(j, "version") != 1) fail(ErrorCode::FormatError, "unsupported model version");
  auto count_names = get<std::vector<std::string>>(j, "count_names");
  auto cov_names = get<std::vector<std::string>>(j, "covariate_names");
  Pdag g = graph_from(field(j, "graph"));
  std::vector<std::shared_ptr<const FittedFactor>> factors;
  for (const json& fj : field(j, "factors")) {
    auto f = std::make_shared<FittedFactor>();
    f->component = get<std::vector<int>>(fj, "component");
    f->parents = get<std::vector<int>>(fj, "parents");
    for (const auto& name : get<std::vector<std::string>>(fj, "covariates")) {
      const auto it = std::find(cov_names.begin(), cov_names.end(), name);
      if (it == cov_names.end()) fail(ErrorCode::FormatError, "unknown covariate '" + name + "'");
      f->covariates.push_back(static_cast<int>(it - cov_names.begin()));
    }
    const auto enc = get<std::string>(fj, "encoding");
    if (enc == "log1p")
      f->encoding = ParentEncoding::Log1p;
    else if (enc != "identity")
      fail(ErrorCode::FormatError, "unknown encoding '" + enc + "'");
    f->family = get<std::string>(fj, "family");
    f->loglik = get<double>(fj, "loglik");
    f->n_params = get<int>(fj, "n_params");
    f->n_obs = get<std::size_t>(fj, "n_obs");
    f->bic = get<double>(fj, "bic");
    f->model = model_payload_from(field(fj, "model"));
    factors.push_back(std::move(f));
  }
  try {
    return make_model(std::move(g), std::move(factors), std::move(count_names), std::move(cov_names));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) fail(ErrorCode::FormatError, e.what());
    throw;
  }
}

std::string graph_to_json(const Pdag& g, const std::vector<std::string>& names) {
  return graph_json(g, names).dump(2) + "\n";
}

Pdag graph_from_json(std::string_view text) {
  const json j = parse_json(text);
  if (j.is_object() && j.contains("graph")) return graph_from(j.at("graph"));
  return graph_from(j);
}

std::string trace_to_jsonl(const SearchTrace& t) {
  std::string out;
  auto emit = [&out](const json& j) { out += j.dump() + "\n"; };
  emit(json{{"type", "init"},
            {"strategy", t.strategy},
            {"init", t.init},
            {"restart", t.restart},
            {"seed", t.seed},
            {"graph", graph_json(t.initial_graph, {})},
            {"score", t.initial_score}});
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const StepRecord& s = t.steps[i];
    emit(json{{"type", "step"},
              {"index", i},
              {"op", describe(s.op)},
              {"score_before", s.score_before},
              {"score_after", s.score_after},
              {"accepted", s.accepted},
              {"phase", s.phase},
              {"temperature", s.temperature},
              {"cache", cache_json(s.cache)}});
  }
  emit(json{{"type", "final"},
            {"graph", graph_json(t.final_graph, {})},
            {"score", t.final_score},
            {"n_steps", t.steps.size()},
            {"cache", cache_json(t.cache)}});
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

}  // namespace pdagcount
