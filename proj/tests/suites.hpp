#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tighthyp/absorb.hpp"
#include "tighthyp/hypergraph.hpp"
#include "tighthyp/motifs.hpp"
#include "tighthyp/solver.hpp"

namespace suites {

using namespace tighthyp;

struct Tally {
  std::uint64_t passed = 0, total = 0;
  std::vector<std::string> failures;  // first few only
  void record(bool ok, const std::string& what) {
    ++total;
    if (ok) ++passed;
    else if (failures.size() < 5) failures.push_back(what);
  }
  bool all() const { return passed == total && total > 0; }
};

inline std::uint32_t uniform(std::mt19937_64& rng, std::uint32_t lo, std::uint32_t hi) {
  return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng);
}

inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline VertexTuple distinct_tuple(std::mt19937_64& rng, std::uint32_t n, std::uint32_t len) {
  VertexTuple all(n);
  for (Vertex v = 0; v < n; ++v) all[v] = v;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(len);
  return all;
}

// Sum of d-set degrees equals C(k,d) e(H); delta_0 equals e(H).
inline Tally handshake(std::uint64_t seed, std::uint32_t instances) {
  Tally t;
  std::mt19937_64 rng(seed);
  for (std::uint32_t i = 0; i < instances; ++i) {
    const std::uint32_t k = uniform(rng, 2, 4), n = uniform(rng, k + 1, 12);
    const auto h = random_graph(n, k, uniform_real(rng, 0, 1), rng());
    bool ok = min_degree(h, 0) == h.edge_count();
    for (std::uint32_t d = 1; d < k; ++d) {
      std::uint64_t sum = 0;
      for (auto x : all_degrees(h, d)) sum += x;
      ok = ok && sum == binom(k, d) * h.edge_count();
    }
    t.record(ok, "handshake instance " + std::to_string(i));
  }
  return t;
}

// The link of v has deg(v) edges, and edges through v match link edges one to one.
inline Tally link_consistency(std::uint64_t seed, std::uint32_t instances) {
  Tally t;
  std::mt19937_64 rng(seed);
  for (std::uint32_t i = 0; i < instances; ++i) {
    const std::uint32_t k = uniform(rng, 2, 4), n = uniform(rng, k + 1, 11);
    const auto h = random_graph(n, k, uniform_real(rng, 0, 1), rng());
    const Vertex v = uniform(rng, 0, n - 1);
    const auto lk = link(h, v);
    bool ok = lk.graph.n() == n - 1 && lk.graph.k() == k - 1 && lk.graph.edge_count() == degree(h, {v}) &&
              lk.graph.edge_count() == oracle::degree(h, {v});
    lk.graph.for_each_edge([&](std::span<const Vertex> f) {
      VertexTuple e{v};
      for (auto u : f) e.push_back(lk.to_original[u]);
      ok = ok && h.has_edge(e);
    });
    t.record(ok, "link instance " + std::to_string(i));
  }
  return t;
}

// In a complete graph every tuple of distinct vertices is good; repeats never are.
inline Tally good_tuple_completeness(std::uint64_t seed, std::uint32_t instances) {
  Tally t;
  std::mt19937_64 rng(seed);
  for (std::uint32_t i = 0; i < instances; ++i) {
    const std::uint32_t k = uniform(rng, 3, 5), n = uniform(rng, k + 1, 14);
    const auto h = complete(n, k);
    GoodTupleParams params;
    params.rho = uniform_real(rng, 0.001, 0.999);
    params.epsilon = 0;
    auto x = distinct_tuple(rng, n, k - 1);
    bool ok = is_good_tuple(h, x, params);
    x[k - 2] = x[0];
    ok = ok && !is_good_tuple(h, x, params);
    t.record(ok, "good tuple instance " + std::to_string(i));
  }
  return t;
}

// Every emitted absorber absorbs what its coverage claims, and every connector
// counted for a demand pair connects it.
inline Tally absorber_connector_validation(std::uint64_t seed, std::uint32_t instances) {
  Tally t;
  std::mt19937_64 rng(seed);
  for (std::uint32_t i = 0; i < instances; ++i) {
    const std::uint32_t n = uniform(rng, 40, 56);
    const auto h = random_graph(n, 3, uniform_real(rng, 0.985, 1.0), rng());
    auto cfg = override_constants(3, 0.1, 0.1, 0.3, std::nullopt, rng());
    const DegreeCache dc(h, cfg.params.rho);
    bool ok = true;
    std::string what = "absorber instance " + std::to_string(i);
    try {
      std::mt19937_64 stage_rng(cfg.seed);
      const auto A = build_absorbers(dc, cfg, stage_rng);
      std::vector<char> used(n, 0);
      for (auto& x : A.tuples) {
        ok = ok && x.size() == 4 && induces_tight_path(h, x) && dc.good(std::span(x).first(2));
        for (auto v : x) {
          ok = ok && !used[v];
          used[v] = 1;
        }
      }
      std::uint64_t min_cov = UINT64_MAX;
      for (Vertex v = 0; v < n; ++v) {
        std::uint32_t c = 0;
        for (auto& x : A.tuples)
          if (std::find(x.begin(), x.end(), v) == x.end() && absorbs(h, x, v, cfg.params)) ++c;
        ok = ok && c == A.coverage[v];
        min_cov = std::min<std::uint64_t>(min_cov, c);
      }
      ok = ok && min_cov == A.min_coverage;

      const auto C = build_connectors(dc, cfg, stage_rng);
      for (std::size_t p = 0; p < C.demand.size(); ++p) {
        const auto& [x, y] = C.demand[p];
        std::uint32_t c = 0;
        for (auto& z : C.tuples) {
          const bool overlap = std::any_of(z.begin(), z.end(), [&](Vertex u) {
            return std::find(x.begin(), x.end(), u) != x.end() || std::find(y.begin(), y.end(), u) != y.end();
          });
          if (!overlap && connects(h, z, x, y)) ++c;
        }
        ok = ok && c == C.pair_coverage[p];
      }
    } catch (const StageFailure& e) {
      what += std::string(" (stage failure: ") + e.what() + ")";
      ok = false;
    }
    t.record(ok, what);
  }
  return t;
}

// Solver answers agree with brute force; every witness passes an independent window check.
inline Tally solver_soundness(std::uint64_t seed, std::uint32_t instances) {
  Tally t;
  std::mt19937_64 rng(seed);
  for (std::uint32_t i = 0; i < instances; ++i) {
    const std::uint32_t k = uniform(rng, 2, 3);
    std::uint32_t l = uniform(rng, 1, k - 1), n = uniform(rng, k + 1, 8);
    if (n % (k - l) != 0) l = k - 1;
    const auto h = random_graph(n, k, uniform_real(rng, 0.3, 1.0), rng());
    SearchConfig cfg;
    cfg.symmetry_reduction = (i % 2) == 0;
    const auto r = find_hamcycle(h, l, cfg);
    const bool brute = oracle::has_ham_cycle(h, l);
    bool ok = r.outcome != SearchOutcome::budget_exhausted && (r.outcome == SearchOutcome::found) == brute;
    if (r.ordering) ok = ok && oracle::windows_ok(oracle::edge_set(h), *r.ordering, k, l);
    t.record(ok, "solver instance " + std::to_string(i) + " n=" + std::to_string(n) + " k=" + std::to_string(k) +
                     " l=" + std::to_string(l));
  }
  return t;
}

}  // namespace suites
