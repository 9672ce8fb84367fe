#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tighthyp/hypergraph.hpp"
#include "tighthyp/motifs.hpp"

namespace tighthyp {

struct SearchConfig {
  std::uint64_t node_budget = 0;  // 0 = unlimited
  // With several threads, return the witness the single-threaded search would
  // return (waits for earlier subtrees). Off: first witness from any worker.
  bool determinism = true;
  // Anchor vertex 0 at position 0 and quotient out the reflection.
  bool symmetry_reduction = true;
  unsigned threads = 1;
};

enum class SearchOutcome { found, refuted, budget_exhausted };

const char* to_string(SearchOutcome o);

struct HamSearchResult {
  SearchOutcome outcome = SearchOutcome::refuted;
  std::optional<VertexTuple> ordering;  // set iff found; windows start at multiples of k-l
  std::uint64_t nodes = 0;
};

/// Exact search for an l-tight Hamiltonian cycle. Vertices are placed position
/// by position along the cyclic ordering; each window is tested the moment its
/// last position is filled. Candidates are tried by ascending degree, ties by
/// index. Every returned ordering has been re-checked with is_l_tight_ham_cycle.
HamSearchResult find_hamcycle(const Hypergraph& h, std::uint32_t l, const SearchConfig& cfg = {});

/// Every labelled copy of P inside the complete P.k-graph on n vertices,
/// deduplicated as edge sets. A copy is the sorted list of colex ranks of its
/// edges. Throws std::length_error when more than `max_maps` injective maps
/// would have to be enumerated.
std::vector<std::vector<std::uint64_t>> enumerate_copies(std::uint32_t n, const TightPattern& p,
                                                         std::uint64_t max_maps = 50'000'000);

/// Number of unused vertices that can be appended at position |partial| of a
/// linear ordering without violating a window (windows start at multiples of
/// k-l) that completes there.
std::uint64_t count_extensions(const Hypergraph& h, std::span<const Vertex> partial, std::uint32_t l);

}  // namespace tighthyp
