#include "tighthyp/constructions.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace tighthyp {

bool is_partial_steiner(const BlockDesign& d) {
  if (d.strength >= d.block_size || d.block_size > d.points) return false;
  const BinomialTable table(d.points, d.strength);
  std::vector<char> covered(binom(d.points, d.strength), 0);
  for (const auto& blk : d.blocks) {
    if (blk.size() != d.block_size || !std::is_sorted(blk.begin(), blk.end()) || !all_distinct(blk)) return false;
    if (!blk.empty() && blk.back() >= d.points) return false;
    bool ok = true;
    for_each_subset(d.block_size, d.strength, [&](std::span<const Vertex> idx) {
      VertexTuple sub(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) sub[i] = blk[idx[i]];
      auto& c = covered[colex_rank(sub, table)];
      if (c) ok = false;
      c = 1;
    });
    if (!ok) return false;
  }
  return true;
}

Hypergraph ore_graph(std::uint32_t n) {
  if (n < 3) throw std::invalid_argument("ore_graph: n must be at least 3");
  Hypergraph h(n, 2);
  for (Vertex a = 0; a + 1 < n - 1; ++a)
    for (Vertex b = a + 1; b < n - 1; ++b) h.add_edge({a, b});
  h.add_edge({0, n - 1});
  return h;
}

Hypergraph clique_plus_link(std::uint32_t n, std::uint32_t k, const Hypergraph& link) {
  if (k < 2 || n < k) throw std::invalid_argument("clique_plus_link: need 2 <= k <= n");
  if (link.n() != n - 1 || link.k() != k - 1) throw std::invalid_argument("clique_plus_link: link must be a (k-1)-graph on n-1 vertices");
  Hypergraph h(n, k);
  for_each_subset(n - 1, k, [&](std::span<const Vertex> e) { h.add_edge(e); });
  VertexTuple e(k);
  link.for_each_edge([&](std::span<const Vertex> f) {
    std::copy(f.begin(), f.end(), e.begin());
    e[k - 1] = n - 1;
    h.add_edge(e);
  });
  return h;
}

Hypergraph kk_lower(std::uint32_t n, std::uint32_t k) {
  if (k < 2 || n < 2 * k - 1) throw std::invalid_argument("kk_lower: need k >= 2 and n >= 2k-1");
  Hypergraph link(n - 1, k - 1);
  VertexTuple e(k - 1);
  e[0] = 0;
  for_each_subset(n - 2, k - 2, [&](std::span<const Vertex> rest) {
    for (std::size_t i = 0; i < rest.size(); ++i) e[i + 1] = rest[i] + 1;
    link.add_edge(e);
  });
  return clique_plus_link(n, k, link);
}

Hypergraph triangle_packing_link(std::uint32_t m) {
  Hypergraph g(m, 2);
  for (Vertex t = 0; t + 3 <= m; t += 3) {
    g.add_edge({t, t + 1});
    g.add_edge({t, t + 2});
    g.add_edge({t + 1, t + 2});
  }
  if (m % 3 == 2) g.add_edge({m - 2, m - 1});
  return g;
}

Hypergraph tuza_construction(std::uint32_t n, std::uint32_t k, const BlockDesign& design) {
  if (k < 3) throw std::invalid_argument("tuza_construction: k must be at least 3");
  if (design.points != n - 1 || design.strength != k - 2 || design.block_size != 2 * k - 3)
    throw std::invalid_argument("tuza_construction: design must be a PS(k-2, 2k-3, n-1)");
  if (!is_partial_steiner(design)) throw std::invalid_argument("tuza_construction: design violates the partial Steiner property");
  Hypergraph link(n - 1, k - 1);
  VertexTuple e(k - 1);
  for (const auto& blk : design.blocks) {
    for_each_subset(design.block_size, k - 1, [&](std::span<const Vertex> idx) {
      for (std::size_t i = 0; i < idx.size(); ++i) e[i] = blk[idx[i]];
      if (link.has_edge(e)) throw std::logic_error("tuza_construction: blocks share a link edge");
      link.add_edge(e);
    });
  }
  if (link.edge_count() != design.blocks.size() * binom(2 * k - 3, k - 1))
    throw std::logic_error("tuza_construction: link edge count mismatch");
  return clique_plus_link(n, k, link);
}

BlockDesign greedy_partial_steiner(std::uint32_t m, std::uint32_t s, std::uint32_t b, std::uint64_t seed) {
  if (!(s < b && b <= m)) throw std::invalid_argument("greedy_partial_steiner: need s < b <= m");
  BlockDesign d{m, b, s, {}};
  const BinomialTable table(m, s);
  std::vector<char> covered(binom(m, s), 0);
  std::mt19937_64 rng(seed);
  std::vector<Vertex> points(m);
  std::iota(points.begin(), points.end(), 0);
  VertexTuple blk(b), sub(s);
  std::vector<std::uint64_t> ranks;
  for (std::uint64_t attempt = 0; attempt < std::uint64_t{kSteinerRetriesPerPoint} * m; ++attempt) {
    blk.clear();
    std::sample(points.begin(), points.end(), std::back_inserter(blk), b, rng);
    ranks.clear();
    bool fresh = true;
    for_each_subset(b, s, [&](std::span<const Vertex> idx) {
      for (std::size_t i = 0; i < idx.size(); ++i) sub[i] = blk[idx[i]];
      const auto r = colex_rank(sub, table);
      if (covered[r]) fresh = false;
      ranks.push_back(r);
    });
    if (!fresh) continue;
    for (auto r : ranks) covered[r] = 1;
    d.blocks.push_back(blk);
  }
  return d;
}

}  // namespace tighthyp
