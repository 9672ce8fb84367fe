#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "oracles.hpp"
#include "tighthyp/extremal.hpp"
#include "tighthyp/solver.hpp"

using namespace tighthyp;

namespace {

double bound(const std::vector<NamedBound>& bs, const std::string& name) {
  for (auto& b : bs)
    if (b.name == name) return b.value;
  return -1;
}

void check_maximal(const ExtremalResult& r, const TightPattern& p) {
  CHECK(r.witness.edge_count() == r.value);
  CHECK(r.value + r.certificate.hitting_set_size == binom(r.n, r.k));
  CHECK(r.hitting_set.size() == r.certificate.hitting_set_size);
  CHECK(r.certificate.root_lower_bound <= r.certificate.hitting_set_size);
  CHECK(r.certificate.hitting_set_size <= r.certificate.greedy_upper_bound);
  CHECK_FALSE(contains_pattern(r.witness, p));
  for (auto& e : r.hitting_set) {
    auto g = r.witness;
    g.add_edge(e);
    CHECK(contains_pattern(g, p));
  }
}

}  // namespace

TEST_CASE("Ore extremal number") {
  const auto p = build_pattern(PatternKind::cycle, 2, 1, 5);
  const auto r = exact_ex(5, p);
  CHECK(r.value == 7);
  check_maximal(r, p);
}

TEST_CASE("P4 extremal numbers") {
  const auto p = build_pattern(PatternKind::path, 2, 1, 4);
  const std::uint64_t expect[] = {3, 4, 6, 6, 7, 9};
  for (std::uint32_t m = 4; m <= 9; ++m) {
    const auto r = exact_ex(m, p);
    CHECK(r.value == expect[m - 4]);
    CHECK(r.value == (m % 3 == 0 ? m : m - 1));
    check_maximal(r, p);
  }
}

TEST_CASE("P4 extremal numbers match the exhaustive sweep") {
  const auto p = build_pattern(PatternKind::path, 2, 1, 4);
  for (std::uint32_t m = 4; m <= 6; ++m) {
    oracle::KSets ks(m, 2);
    const auto sweep = oracle::sweep_ex(ks, oracle::copy_masks(ks, p));
    CHECK(exact_ex(m, p).value == sweep.value);
  }
}

TEST_CASE("small tight cycles in 3-graphs") {
  for (std::uint32_t l : {1u, 2u}) {
    const auto p = build_pattern(PatternKind::cycle, 3, l, 6);
    const auto r = exact_ex(6, p);
    CHECK(r.value == (l == 1 ? 10 : 14));
    check_maximal(r, p);
  }
}

TEST_CASE("degenerate patterns and budgets") {
  CHECK_THROWS_AS(exact_ex(5, build_pattern(PatternKind::path, 2, 1, 1)), std::invalid_argument);
  ExtremalOptions o;
  o.node_budget = 3;
  CHECK_THROWS_AS(exact_ex(9, build_pattern(PatternKind::path, 2, 1, 4), o), BudgetExhausted);
  ExtremalOptions cap;
  cap.max_copies = 10;
  CHECK_THROWS_AS(exact_ex(6, build_pattern(PatternKind::cycle, 3, 2, 6), cap), std::length_error);
}

TEST_CASE("result cache") {
  const auto path = std::filesystem::temp_directory_path() / "tighthyp_test_cache.json";
  std::filesystem::remove(path);
  ExtremalOptions o;
  o.cache_path = path.string();
  const auto p = build_pattern(PatternKind::path, 2, 1, 4);
  const auto first = exact_ex(7, p, o);
  CHECK_FALSE(first.from_cache);
  const auto second = exact_ex(7, p, o);
  CHECK(second.from_cache);
  CHECK(second.value == first.value);
  CHECK(second.witness == first.witness);
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in);
  REQUIRE(j.contains("n=7 k=2 path 2 1 4"));
  CHECK(j["n=7 k=2 path 2 1 4"]["value"] == 6);
  CHECK(j["n=7 k=2 path 2 1 4"].contains("timestamp"));
  CHECK(j["n=7 k=2 path 2 1 4"].contains("certificate"));

  ExtremalOptions tiny = o;
  tiny.node_budget = 2;
  CHECK_THROWS_AS(exact_ex(9, p, tiny), BudgetExhausted);
  std::ifstream again(path);
  CHECK_FALSE(nlohmann::json::parse(again).contains("n=9 k=2 path 2 1 4"));
  std::filesystem::remove(path);
}

TEST_CASE("theorem formula") {
  CHECK(theorem1_rhs(10, 3, 2) == 93);
  CHECK(theorem1_rhs(9, 3, 2) == 63);
  CHECK(theorem1_rhs(8, 3, 1) == 35);
  CHECK(theorem1_rhs(7, 3, 2) == 26);
  CHECK_THROWS_AS(theorem1_rhs(7, 3, 1), std::invalid_argument);
  CHECK(theorem1_rhs(6, 3, 2) == exact_ex(6, build_pattern(PatternKind::cycle, 3, 2, 6)).value);
}

TEST_CASE("known bounds") {
  const auto b7 = known_bounds(7, 3, 2);
  CHECK(bound(b7, "kk-general") == 25);
  CHECK(bound(b7, "kk-k3") == 26);
  CHECK(bound(b7, "tuza-steiner") == 26);
  CHECK(bound(known_bounds(10, 4, 3), "kk-general") == 154);
  CHECK(bound(known_bounds(10, 3, 2), "gkl-upper") == 102);
  CHECK(bound(known_bounds(10, 3, 2, 1.0), "tuza-partial") == 93);
  CHECK(bound(known_bounds(10, 3, 2, 0.5), "tuza-partial") == 88.5);
  CHECK(bound(known_bounds(8, 3, 2), "kk-k3") == -1);
  CHECK(bound(known_bounds(12, 4, 3), "tuza-steiner") == -1);
  CHECK(bound(known_bounds(10, 3, 1), "kk-general") == -1);
  for (auto& b : known_bounds(13, 3, 2, 0.3))
    if (b.lower) CHECK(b.value <= bound(known_bounds(13, 3, 2), "gkl-upper"));
}

TEST_CASE("Dirac thresholds at tiny n") {
  for (std::uint32_t n = 4; n <= 6; ++n) {
    const auto r = exact_h(n, 2, 1, 1);
    CHECK(r.value == (n + 1) / 2);
    CHECK(r.value == oracle::sweep_dirac(n));
    CHECK(min_degree(r.witness, 1) + 1 == r.value);
    CHECK(find_hamcycle(r.witness, 1).outcome == SearchOutcome::refuted);
  }
}

TEST_CASE("edge-count thresholds") {
  const auto h5 = exact_h(5, 2, 1, 0);
  CHECK(h5.value == 8);
  CHECK(h5.value == exact_ex(5, build_pattern(PatternKind::cycle, 2, 1, 5)).value + 1);
  const auto h6 = exact_h(6, 3, 1, 0);
  CHECK(h6.value == exact_ex(6, build_pattern(PatternKind::cycle, 3, 1, 6)).value + 1);
  CHECK(h6.value == 11);
  CHECK_THROWS_AS(exact_h(7, 3, 2, 1), std::invalid_argument);
}
