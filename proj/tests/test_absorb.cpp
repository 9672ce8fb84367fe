#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "tighthyp/absorb.hpp"

using namespace tighthyp;

namespace {

bool path_windows(const Hypergraph& h, const VertexTuple& seq) {
  const auto edges = oracle::edge_set(h);
  for (std::size_t i = 0; i + h.k() <= seq.size(); ++i) {
    VertexTuple w(seq.begin() + i, seq.begin() + i + h.k());
    std::sort(w.begin(), w.end());
    if (!edges.count(w)) return false;
  }
  return true;
}

// Absorption by definition: both sequences are tight paths and both ends are good.
bool absorbs_brute(const Hypergraph& h, const VertexTuple& x, Vertex v, const GoodTupleParams& params) {
  const std::uint32_t k = h.k();
  VertexTuple with(x.begin(), x.begin() + (k - 1));
  with.push_back(v);
  with.insert(with.end(), x.begin() + (k - 1), x.end());
  VertexTuple head(x.begin(), x.begin() + (k - 1)), tail(x.rbegin(), x.rbegin() + (k - 1));
  return path_windows(h, x) && path_windows(h, with) && is_good_tuple(h, head, params) && is_good_tuple(h, tail, params);
}

VertexTuple distinct(std::mt19937_64& rng, std::uint32_t n, std::uint32_t len) {
  VertexTuple all(n);
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(len);
  return all;
}

}  // namespace

TEST_CASE("paper constants") {
  const auto c3 = default_constants(3);
  CHECK(c3.params.epsilon == doctest::Approx(3.7946e-11).epsilon(1e-3));
  CHECK(c3.gamma == doctest::Approx(1.0 / 576));
  CHECK(c3.beta == doctest::Approx(1.0 / 34560));
  CHECK_FALSE(c3.override_constants);
  const auto c2 = default_constants(2);
  CHECK(c2.params.epsilon == doctest::Approx(1.0 / 225280));
  CHECK(c2.params.rho == doctest::Approx(1.0 / 10240));
  for (std::uint32_t k = 2; k <= 5; ++k) {
    const auto c = default_constants(k);
    CHECK(std::pow(c.params.rho, k - 1.0) == doctest::Approx(22 * c.params.epsilon));
  }
  const auto o = override_constants(3, 0.05, 0.05, 0.1);
  CHECK(o.override_constants);
  CHECK(o.params.epsilon == doctest::Approx(0.01));
  CHECK_THROWS_AS(override_constants(3, 0, 0.05, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(override_constants(3, 0.05, 0.05, 1.0), std::invalid_argument);
}

TEST_CASE("good pair fraction") {
  GoodTupleParams params{0.01, 0.1};
  CHECK(good_pair_fraction(complete(60, 3), params, 20000, 1) >= 1.0 - 16.0 / 60);
  CHECK(good_pair_fraction(Hypergraph(60, 3), params, 2000, 1) == 0.0);
  CHECK(good_pair_fraction(complete(40, 3), params, 5000, 9) == good_pair_fraction(complete(40, 3), params, 5000, 9));
}

TEST_CASE("absorption predicate") {
  GoodTupleParams params{0.01, 0.1};
  const auto k = complete(20, 3);
  const VertexTuple x{3, 7, 11, 2};
  CHECK(absorbs(k, x, 5, params));
  auto h = k;
  h.remove_edge({7, 5, 11});
  CHECK_FALSE(absorbs(h, x, 5, params));
  CHECK(absorbs(h, x, 6, params));

  std::mt19937_64 rng(4);
  for (int i = 0; i < 500; ++i) {
    const auto g = random_graph(12, 3, 0.9, rng());
    const auto t = distinct(rng, 12, 5);
    const VertexTuple xs(t.begin(), t.begin() + 4);
    CHECK(absorbs(g, xs, t[4], params) == absorbs_brute(g, xs, t[4], params));
    const DegreeCache dc(g, params.rho);
    CHECK(absorbs(dc, xs, t[4]) == absorbs_brute(g, xs, t[4], params));
  }
}

TEST_CASE("connection predicate") {
  const auto k = complete(12, 3);
  const VertexTuple x{0, 1}, z{2, 3}, y{4, 5};
  CHECK(connects(k, z, x, y));
  auto h = k;
  h.remove_edge({3, 4, 5});
  CHECK_FALSE(connects(h, z, x, y));
  CHECK_THROWS_AS(connects(k, VertexTuple{0, 3}, x, y), std::invalid_argument);

  std::mt19937_64 rng(8);
  for (int i = 0; i < 300; ++i) {
    const auto g = random_graph(10, 3, 0.8, rng());
    const auto t = distinct(rng, 10, 6);
    const VertexTuple xs{t[0], t[1]}, zs{t[2], t[3]}, ys{t[4], t[5]};
    const VertexTuple seq{t[1], t[0], t[2], t[3], t[4], t[5]};
    CHECK(connects(g, zs, xs, ys) == path_windows(g, seq));
  }
}

TEST_CASE("absorber sets") {
  const auto h = complete(200, 3);
  auto cfg = override_constants(3, 0.02, 0.02, 0.1, std::nullopt, 5);
  const auto a = build_absorbers(h, cfg);
  CHECK(a.bounds_met);
  CHECK(a.tuples.size() <= 8);
  CHECK(a.min_coverage >= 1);
  std::set<Vertex> seen;
  for (auto& x : a.tuples) {
    for (auto v : x) CHECK(seen.insert(v).second);
    for (Vertex v = 0; v < 200; ++v)
      if (std::find(x.begin(), x.end(), v) == x.end()) CHECK(absorbs(h, x, v, cfg.params));
  }
  CHECK_THROWS_AS(build_absorbers(Hypergraph(40, 3), override_constants(3, 0.1, 0.1, 0.1)), StageFailure);
  auto paper = default_constants(3);
  CHECK_THROWS_AS(build_absorbers(complete(60, 3), paper), StageFailure);
}

TEST_CASE("connector sets") {
  const auto h = complete(200, 3);
  auto cfg = override_constants(3, 0.02, 0.02, 0.1, std::nullopt, 6);
  const auto c = build_connectors(h, cfg);
  CHECK(c.bounds_met);
  CHECK(c.tuples.size() <= 8);
  CHECK_FALSE(c.demand.empty());
  std::set<Vertex> seen;
  for (auto& z : c.tuples)
    for (auto v : z) CHECK(seen.insert(v).second);
  for (std::size_t p = 0; p < c.demand.size(); ++p) CHECK(c.pair_coverage[p] >= 1);
  CHECK_THROWS_AS(build_connectors(complete(200, 3), default_constants(3)), StageFailure);
  CHECK_THROWS_AS(build_connectors(Hypergraph(40, 3), override_constants(3, 0.1, 0.1, 0.1)), StageFailure);
}

TEST_CASE("one path through the absorbers") {
  const auto h = complete(100, 3);
  auto cfg = override_constants(3, 0.05, 0.05, 0.1, std::nullopt, 2);
  const DegreeCache dc(h, cfg.params.rho);
  std::mt19937_64 rng(1);
  std::vector<char> forbidden(100, 0);
  for (Vertex v = 50; v < 100; ++v) forbidden[v] = 1;
  const std::vector<VertexTuple> a{{0, 1, 2, 3}, {4, 5, 6, 7}};
  const auto p = stitch_onepath(dc, a, forbidden, cfg, rng);
  CHECK(p.size() == 10);
  CHECK(VertexTuple(p.begin(), p.begin() + 4) == a[0]);
  CHECK(VertexTuple(p.begin() + 6, p.end()) == a[1]);
  for (auto v : p) CHECK(v < 50);
  CHECK(induces_tight_path(h, p));
  CHECK(stitch_onepath(dc, {}, forbidden, cfg, rng).empty());
}

TEST_CASE("path extension") {
  const auto h = complete(30, 3);
  const DegreeCache dc(h, 0.1);
  const auto full = extend_path(dc, {0, 1}, {});
  CHECK(full.size() == 30);
  CHECK(induces_tight_path(h, full));
  std::vector<char> forbidden(30, 1);
  forbidden[0] = forbidden[1] = forbidden[2] = 0;
  CHECK(extend_path(dc, {0, 1, 2}, forbidden) == VertexTuple{0, 1, 2});

  const auto g = random_graph(40, 3, 0.95, 3);
  const DegreeCache dg(g, 0.3);
  std::vector<char> none;
  VertexTuple seed;
  for_each_subset(40, 2, [&](std::span<const Vertex> s) {
    if (seed.empty() && dg.good(s)) seed.assign(s.begin(), s.end());
  });
  REQUIRE_FALSE(seed.empty());
  const auto ext = extend_path(dg, seed, none);
  CHECK(induces_tight_path(g, ext));
  CHECK(dg.good(VertexTuple(ext.begin(), ext.begin() + 2)));
  CHECK(dg.good(VertexTuple{ext[ext.size() - 1], ext[ext.size() - 2]}));
}

TEST_CASE("peeling: nothing to peel") {
  const auto r = peel_and_embed(complete(20, 3), 2, override_constants(3, 0.05, 0.05, 0.3));
  CHECK(r.t == 0);
  CHECK(r.embed_case == 0);
  CHECK(r.segments.empty());
}

TEST_CASE("peeling: one nearly isolated vertex") {
  auto h = complete(20, 3);
  for (auto& e : complete(20, 3).edges())
    if (e.back() == 19 && !(e[0] == 4 && e[1] == 9)) h.remove_edge(e);
  const auto r = peel_and_embed(h, 1, override_constants(3, 0.05, 0.05, 0.3));
  CHECK(r.t == 1);
  CHECK(r.embed_case == 1);
  REQUIRE(r.segments.size() == 1);
  CHECK(r.segments[0].order == VertexTuple{4, 19, 9});
  CHECK(r.segments[0].exempt == Vertex{19});
}

TEST_CASE("peeling: several moderately low vertices") {
  auto h = complete(30, 3);
  std::mt19937_64 rng(12);
  std::bernoulli_distribution keep(0.4);
  for (auto& e : complete(30, 3).edges())
    if (e.back() >= 27 && !keep(rng)) h.remove_edge(e);
  const auto r = peel_and_embed(h, 2, override_constants(3, 0.05, 0.05, 0.3));
  CHECK(r.t == 3);
  CHECK(r.embed_case == 2);
  CHECK(r.case2_degree_ok);
  REQUIRE(r.segments.size() == 3);
  std::set<Vertex> seen;
  const DegreeCache dc(h, r.active, 0.3);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& s = r.segments[i].order;
    CHECK(s.size() == 5);
    CHECK(s[2] == r.peeled[i]);
    CHECK(induces_tight_path(h, s));
    CHECK(dc.good(VertexTuple{s[0], s[1]}));
    CHECK(dc.good(VertexTuple{s[4], s[3]}));
    for (auto v : s) CHECK(seen.insert(v).second);
  }
}

TEST_CASE("pipeline on complete graphs") {
  for (std::uint32_t l : {1u, 2u}) {
    const auto h = complete(60, 3);
    auto cfg = override_constants(3, 0.05, 0.05, 0.1, std::nullopt, 7);
    const auto r = run_pipeline(h, l, cfg);
    REQUIRE(r.cycle);
    CHECK(is_l_tight_ham_cycle(h, *r.cycle, l));
    CHECK(r.trace.outcome == "cycle");
    CHECK(r.trace.mode == "override");
    CHECK(r.trace.failure_stage.empty());
  }
  CHECK_THROWS_AS(run_pipeline(complete(61, 3), 1, override_constants(3, 0.05, 0.05, 0.1)), std::invalid_argument);
}

TEST_CASE("pipeline is deterministic in its seed") {
  const auto h = random_graph(60, 3, 0.995, 3);
  const auto cfg = override_constants(3, 0.05, 0.05, 0.1, std::nullopt, 3);
  const auto a = run_pipeline(h, 2, cfg);
  const auto b = run_pipeline(h, 2, cfg);
  CHECK(a.cycle == b.cycle);
  CHECK(a.trace.attempts == b.trace.attempts);
  CHECK(a.trace.attempt_failures == b.trace.attempt_failures);
  REQUIRE(a.trace.stages.size() == b.trace.stages.size());
  for (std::size_t i = 0; i < a.trace.stages.size(); ++i) {
    auto x = a.trace.stages[i], y = b.trace.stages[i];
    x.erase("wall_ms");
    y.erase("wall_ms");
    CHECK(x == y);
  }
  if (a.cycle) CHECK(is_l_tight_ham_cycle(h, *a.cycle, 2));
}

TEST_CASE("pipeline trace") {
  const auto r = run_pipeline(complete(30, 3), 2, override_constants(3, 0.2, 0.2, 0.1, std::nullopt, 1));
  const auto j = r.trace.to_json();
  CHECK(j["mode"] == "override");
  REQUIRE(j["stages"].is_array());
  int last = 0;
  for (auto& s : j["stages"]) {
    CHECK(s.contains("name"));
    CHECK(s.contains("wall_ms"));
    CHECK(s["step"].get<int>() >= last);
    last = s["step"].get<int>();
  }
}
