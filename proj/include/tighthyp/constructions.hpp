#pragma once

#include <cstdint>
#include <vector>

#include "tighthyp/hypergraph.hpp"

namespace tighthyp {

// Partial Steiner system PS(s, b, m): b-subsets of m points, each s-subset in at most one block.
struct BlockDesign {
  std::uint32_t points = 0;
  std::uint32_t block_size = 0;
  std::uint32_t strength = 0;
  std::vector<VertexTuple> blocks;  // each sorted
};

bool is_partial_steiner(const BlockDesign& d);

/// K_{n-1} on 0..n-2 plus vertex n-1 joined to vertex 0 only.
Hypergraph ore_graph(std::uint32_t n);

/// Complete k-graph on 0..n-2 plus vertex n-1 whose link is L (L lives on
/// n-1 vertices, uniformity k-1, vertex i of L is vertex i of the result).
Hypergraph clique_plus_link(std::uint32_t n, std::uint32_t k, const Hypergraph& link);

/// clique_plus_link with the star link: every (k-1)-subset of 0..n-2 containing 0.
Hypergraph kk_lower(std::uint32_t n, std::uint32_t k);

/// 2-graph on m vertices made of floor(m/3) disjoint triangles, plus one edge on
/// the last two vertices when m = 2 mod 3. Has ex(m, P4) edges and no P4.
Hypergraph triangle_packing_link(std::uint32_t m);

/// clique_plus_link with the link made of all (k-1)-subsets of every block of a
/// PS(k-2, 2k-3, n-1).
Hypergraph tuza_construction(std::uint32_t n, std::uint32_t k, const BlockDesign& design);

inline constexpr std::uint32_t kSteinerRetriesPerPoint = 50;

/// Adds uniformly random b-subsets whose s-subsets are all still uncovered,
/// stopping after 50*m attempts in total.
BlockDesign greedy_partial_steiner(std::uint32_t m, std::uint32_t s, std::uint32_t b, std::uint64_t seed);

}  // namespace tighthyp
