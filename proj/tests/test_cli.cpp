#include <doctest.h>

#include <nlohmann/json.hpp>

#include "cli_support.hpp"
#include "pdagcount/io.hpp"
#include "test_models.hpp"

using namespace pdagcount;
using nlohmann::json;

namespace {

// Writes the 0 -> 1 model and 600 rows sampled from it.
void prepare(const cli::ScratchDir& dir) {
  cli::spit(dir / "truth.json", model_to_json(models::chain_two()));
  const cli::Result r = cli::run({"simulate", "--model", dir / "truth.json", "--n", "600", "--seed", "3", "--out", dir / "data.csv"});
  REQUIRE(r.code == 0);
}

}  // namespace

TEST_CASE("cli simulate") {
  cli::ScratchDir dir("pdagcount-cli");
  prepare(dir);
  const std::string first = cli::slurp(dir / "data.csv");
  const cli::Result again = cli::run({"simulate", "--model", dir / "truth.json", "--n", "600", "--seed", "3"});
  CHECK(again.code == 0);
  CHECK(again.out == first);
  CHECK(read_csv_file(dir / "data.csv") == sample(models::chain_two(), 600, {}, 3));

  const cli::Result empty = cli::run({"simulate", "--model", dir / "truth.json", "--n", "0"});
  CHECK(empty.code == 0);
  CHECK(empty.out == "v0,v1\n");
}

TEST_CASE("cli fit is reproducible") {
  cli::ScratchDir dir("pdagcount-cli");
  prepare(dir);
  auto fit = [&](const std::string& tag, std::vector<std::string> extra) {
    std::vector<std::string> args{"fit", "--data", dir / "data.csv", "--out-model", dir / (tag + ".json"),
                                  "--out-dot", dir / (tag + ".dot"), "--out-trace", dir / (tag + ".jsonl")};
    args.insert(args.end(), extra.begin(), extra.end());
    return cli::run(args);
  };
  const std::vector<std::string> anneal{"--strategy", "anneal", "--seed", "7", "--anneal-steps", "150"};
  const cli::Result a = fit("a", anneal);
  const cli::Result b = fit("b", anneal);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  for (const char* ext : {".json", ".dot", ".jsonl"}) CHECK(cli::slurp(dir / (std::string("a") + ext)) == cli::slurp(dir / (std::string("b") + ext)));

  const cli::Result h = fit("h", {"--strategy", "hill"});
  REQUIRE(h.code == 0);
  const Pdag g = graph_from_json(cli::slurp(dir / "h.json"));
  CHECK(g.n_edges() == 1);
  CHECK(g.adjacent(0, 1));
  const json summary = json::parse(h.out);
  CHECK(summary["factors"].size() == model_from_json(cli::slurp(dir / "h.json")).factors.size());
  CHECK(cli::slurp(dir / "h.dot").rfind("digraph", 0) == 0);

  const std::vector<std::string> restarts{"--strategy", "first", "--init", "random", "--restarts", "3", "--seed", "11"};
  const cli::Result r1 = fit("r1", restarts);
  const cli::Result r2 = fit("r2", restarts);
  CHECK(r1.code == 0);
  CHECK(r1.out == r2.out);
  CHECK(json::parse(r1.out)["restart_scores"].size() == 3);
}

TEST_CASE("cli score and benchmark") {
  cli::ScratchDir dir("pdagcount-cli");
  prepare(dir);
  const std::vector<std::string> score{"score", "--data", dir / "data.csv", "--graph", dir / "truth.json"};
  const cli::Result s1 = cli::run(score);
  const cli::Result s2 = cli::run(score);
  REQUIRE(s1.code == 0);
  CHECK(s1.out == s2.out);

  const std::vector<std::string> bench{"benchmark", "--data", dir / "data.csv", "--truth", dir / "truth.json", "--no-timing",
                                       "--score-mode", "both"};
  const cli::Result b1 = cli::run(bench);
  const cli::Result b2 = cli::run(bench);
  REQUIRE(b1.code == 0);
  CHECK(b1.out == b2.out);
  const json report = json::parse(b1.out);
  CHECK(report["runs"].size() == 4);
  for (const auto& run : report["runs"]) {
    CHECK(run["shd"].get<int>() >= 0);
    CHECK_FALSE(run.contains("wall_time_ms"));
  }
  const json& on = report["runs"][0];
  const json& off = report["runs"][1];
  CHECK(on["cache"] == "on");
  CHECK(off["cache"] == "off");
  CHECK(on["graph"] == off["graph"]);
  CHECK(on["fits_performed"].get<long>() < off["fits_performed"].get<long>());

  const cli::Result timed = cli::run({"benchmark", "--data", dir / "data.csv", "--truth", dir / "truth.json", "--cache", "on"});
  REQUIRE(timed.code == 0);
  CHECK(json::parse(timed.out)["runs"][0].contains("wall_time_ms"));
}

TEST_CASE("cli exit codes") {
  cli::ScratchDir dir("pdagcount-cli");
  cli::spit(dir / "neg.csv", "a,b\n1,-2\n");
  cli::spit(dir / "ok.csv", "a,b\n1,2\n3,4\n0,1\n");
  CHECK(cli::run({"fit", "--data", dir / "missing.csv"}).code == 2);
  CHECK(cli::run({"fit", "--data", dir / "neg.csv"}).code == 2);
  CHECK(cli::run({"fit", "--data", dir / "ok.csv", "--strategy", "tabu"}).code == 2);
  CHECK(cli::run({"fit", "--bogus"}).code == 2);
  CHECK(cli::run({"simulate", "--model", dir / "ok.csv"}).code == 2);
  CHECK(cli::run({"fit", "--data", dir / "ok.csv"}).code == 0);
}
