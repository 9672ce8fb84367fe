#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tighthyp/cli.hpp"
#include "tighthyp/constructions.hpp"
#include "tighthyp/hypergraph.hpp"

using namespace tighthyp;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "tighthyp_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) v.push_back(line);
  return v;
}

}  // namespace

TEST_CASE("gen writes constructions") {
  const auto ore = run({"gen", "--family", "ore", "--n", "6"});
  CHECK(ore.code == cli::kOk);
  std::istringstream in(ore.out);
  CHECK(read_text(in).edge_count() == 11);

  const auto path = scratch("kk.txt");
  const auto kk = run({"gen", "--family", "kk", "--n", "7", "--k", "3", "--out", path.string(), "--json"});
  CHECK(kk.code == cli::kOk);
  CHECK(load_text(path.string()).edge_count() == 25);
  const auto rec = nlohmann::json::parse(kk.out);
  CHECK(rec["command"] == "gen");
  CHECK(rec["parameters"]["edges"] == 25);
  CHECK(rec["artifacts"][0] == path.string());

  const auto rnd = run({"gen", "--family", "random", "--n", "7", "--k", "3", "--p", "1", "--seed", "4"});
  std::istringstream rin(rnd.out);
  CHECK(read_text(rin) == complete(7, 3));

  const auto tri = run({"gen", "--family", "clique-link", "--n", "10", "--k", "3"});
  std::istringstream tin(tri.out);
  CHECK(read_text(tin).edge_count() == 93);
}

TEST_CASE("gen rejects bad input") {
  CHECK(run({"gen", "--family", "petersen", "--n", "6"}).code == cli::kUsage);
  CHECK(run({"gen", "--family", "random", "--n", "6", "--k", "3"}).code == cli::kUsage);
  CHECK(run({"gen", "--family", "ore", "--n", "2"}).code == cli::kUsage);
  CHECK(run({"gen", "--family", "ore", "--n", "6", "--json"}).code == cli::kUsage);
  CHECK(run({"gen"}).code == cli::kUsage);
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("solve exit codes") {
  const auto k8 = scratch("k8.txt");
  save_text(k8.string(), complete(8, 3));
  const auto found = run({"solve", "--in", k8.string(), "--l", "1"});
  CHECK(found.code == cli::kOk);
  const auto ls = lines(found.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == "found");

  const auto ore = scratch("ore7.txt");
  save_text(ore.string(), ore_graph(7));
  CHECK(run({"solve", "--in", ore.string(), "--l", "1"}).code == cli::kNone);

  const auto hard = scratch("hard.txt");
  save_text(hard.string(), clique_plus_link(10, 3, triangle_packing_link(9)));
  const auto budget = run({"solve", "--in", hard.string(), "--l", "2", "--budget", "1", "--json"});
  CHECK(budget.code == cli::kBudget);
  CHECK(nlohmann::json::parse(budget.out)["outcome"] == "budget-exhausted");

  CHECK(run({"solve", "--in", scratch("missing.txt").string(), "--l", "1"}).code == cli::kUsage);
  CHECK(run({"solve", "--in", k8.string(), "--l", "2"}).code == cli::kOk);
  CHECK(run({"solve", "--in", ore.string(), "--l", "1", "--threads", "3", "--json"}).code == cli::kNone);
}

TEST_CASE("ex and verify-thm1") {
  const auto ex = run({"ex", "--n", "7", "--k", "2", "--kind", "path", "--l", "1", "--t", "4", "--json"});
  CHECK(ex.code == cli::kOk);
  const auto j = nlohmann::json::parse(ex.out);
  CHECK(j["value"] == 6);
  CHECK(j["witness"].size() == 6);

  const auto rhs = run({"verify-thm1", "--n", "8", "--k", "3", "--l", "2", "--budget", "20000", "--json"});
  CHECK(rhs.code == cli::kOk);
  const auto r = nlohmann::json::parse(rhs.out);
  CHECK(r["rhs"] == 41);
  CHECK(r["outcome"] == "RHS-ONLY");

  const auto both = run({"verify-thm1", "--n", "6", "--k", "3", "--l", "1"});
  CHECK(both.code == cli::kOk);
  CHECK(lines(both.out).back() == "MATCH");
  const auto tight = run({"verify-thm1", "--n", "6", "--k", "3", "--l", "2", "--json"});
  CHECK(nlohmann::json::parse(tight.out)["outcome"] == "MATCH");

  CHECK(run({"verify-thm1", "--n", "7", "--k", "3", "--l", "1"}).code == cli::kUsage);
  CHECK(run({"ex", "--n", "9", "--k", "2", "--kind", "path", "--t", "4", "--budget", "2"}).code == cli::kBudget);
  CHECK(run({"ex", "--n", "6", "--k", "2", "--kind", "star"}).code == cli::kUsage);
}

TEST_CASE("pipeline command") {
  const auto in = scratch("k30.txt");
  save_text(in.string(), complete(30, 3));
  const auto trace = scratch("trace.json");
  const auto r = run({"pipeline", "--in", in.string(), "--l", "2", "--seed", "1", "--gamma", "0.05", "--beta", "0.05",
                      "--rho", "0.1", "--trace", trace.string(), "--json"});
  CHECK(r.code == cli::kOk);
  const auto rec = nlohmann::json::parse(r.out);
  CHECK(rec["outcome"] == "cycle");
  CHECK(rec["cycle"].size() == 30);
  std::ifstream tf(trace);
  const auto tj = nlohmann::json::parse(tf);
  CHECK(tj["mode"] == "override");

  const auto odd = scratch("k31.txt");
  save_text(odd.string(), complete(31, 3));
  CHECK(run({"pipeline", "--in", odd.string(), "--l", "1", "--seed", "1", "--rho", "0.1"}).code == cli::kUsage);
  CHECK(run({"pipeline", "--in", in.string(), "--l", "2"}).code == cli::kUsage);
  CHECK(run({"pipeline", "--in", in.string(), "--l", "2", "--seed", "1"}).code == cli::kStageFailure);
}

TEST_CASE("scan command") {
  const auto r = run({"scan", "--k", "2", "--l", "1", "--d", "1", "--n-range", "4:6", "--seed", "1"});
  CHECK(r.code == cli::kOk);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 4);
  CHECK(ls[0] == "n,k,l,d,mode,value,ci_low,ci_high,seed");
  CHECK(ls[1] == "4,2,1,1,exact,2,2,2,1");
  CHECK(ls[2] == "5,2,1,1,exact,3,3,3,1");
  CHECK(ls[3] == "6,2,1,1,exact,3,3,3,1");

  const auto empty = run({"scan", "--k", "2", "--l", "1", "--d", "1", "--n-range", "6:4", "--seed", "1"});
  CHECK(lines(empty.out).size() == 1);

  const auto csv = scratch("scan.csv");
  const auto s = run({"scan", "--k", "2", "--l", "1", "--d", "1", "--n-range", "8:9", "--seed", "5", "--mode", "sampled",
                      "--samples", "5", "--csv", csv.string()});
  CHECK(s.code == cli::kOk);
  std::ifstream f(csv);
  std::string header, row;
  std::getline(f, header);
  std::getline(f, row);
  CHECK(row.rfind("8,2,1,1,sampled,", 0) == 0);
  const auto again = run({"scan", "--k", "2", "--l", "1", "--d", "1", "--n-range", "8:9", "--seed", "5", "--mode",
                          "sampled", "--samples", "5"});
  std::ifstream f2(csv);
  std::stringstream whole;
  whole << f2.rdbuf();
  CHECK(whole.str() == again.out);

  CHECK(run({"scan", "--k", "2", "--l", "1", "--d", "1", "--n-range", "4-6", "--seed", "1"}).code == cli::kUsage);
  CHECK(run({"scan", "--k", "2", "--l", "1", "--d", "1", "--n-range", "4:6"}).code == cli::kUsage);
}
