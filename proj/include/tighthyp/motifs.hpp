#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tighthyp/hypergraph.hpp"

namespace tighthyp {

enum class PatternKind { path, cycle };

// l-tight k-uniform path or cycle template on t vertices 0..t-1. Edges are the
// width-k windows at stride k-l (indices taken mod t for cycles).
struct TightPattern {
  PatternKind kind = PatternKind::path;
  std::uint32_t k = 2;
  std::uint32_t l = 1;
  std::uint32_t t = 2;

  std::uint32_t stride() const { return k - l; }
  std::uint64_t edge_count() const { return kind == PatternKind::path ? (t - l) / (k - l) : t / (k - l); }
  std::vector<VertexTuple> edges() const;
  std::string describe() const;  // "path k l t" / "cycle k l t"

  bool operator==(const TightPattern&) const = default;
};

/// Validates divisibility and l < k. Cycles additionally need t >= k and
/// pairwise distinct windows (t > k whenever there is more than one window).
TightPattern build_pattern(PatternKind kind, std::uint32_t k, std::uint32_t l, std::uint32_t t);

// P(k,l): the (k-1)-uniform (l-1)-tight path on floor(k/(k-l))(k-l)+l-1 vertices.
// l = 0 is read as the single-edge (k-1)-uniform path on k-1 vertices.
TightPattern build_P(std::uint32_t k, std::uint32_t l);

// "kind k l t" header followed by the pattern's edges in the hypergraph text format.
void write_pattern(std::ostream& os, const TightPattern& p);
TightPattern read_pattern(std::istream& is);

/// Checks every cyclic window {ord[i(k-l)], ..., ord[i(k-l)+k-1]} is an edge.
/// Throws on non-permutations and when (k-l) does not divide n.
bool is_l_tight_ham_cycle(const Hypergraph& h, std::span<const Vertex> ordering, std::uint32_t l);

// ---- good tuples -------------------------------------------------------------

struct GoodTupleParams {
  double epsilon = 0.0;
  double rho = 0.0;

  /// epsilon = 1 / (22 (1280 k^3)^(k-1)).
  static double default_epsilon(std::uint32_t k);
  /// rho = (22 epsilon)^(1/(k-1)).
  static GoodTupleParams from_epsilon(std::uint32_t k, double epsilon);
  static GoodTupleParams paper_default(std::uint32_t k) { return from_epsilon(k, default_epsilon(k)); }
};

/// Relative slack applied to floating degree thresholds.
inline constexpr long double kThresholdRelTol = 1e-12L;

/// (1 - rho^(k-i)) * C(n-i, k-i): the minimum degree of the i-prefix of a good tuple.
long double good_threshold(std::uint64_t n, std::uint32_t k, std::uint32_t i, double rho);

/// deg >= threshold, with the threshold relaxed by kThresholdRelTol.
inline bool meets_threshold(std::uint64_t deg, long double threshold) {
  const long double slack = threshold > 0 ? threshold * kThresholdRelTol : 0.0L;
  return static_cast<long double>(deg) >= threshold - slack;
}

/// A (k-1)-tuple with distinct entries whose every prefix meets good_threshold.
bool is_good_tuple(const Hypergraph& h, std::span<const Vertex> x, const GoodTupleParams& params);

// ---- embeddings ---------------------------------------------------------------

struct EmbeddingOptions {
  // Optional per-vertex mask of the host graph; empty means all vertices allowed.
  std::span<const char> allowed;
  // Called after each pattern vertex is placed with the mapped prefix; return
  // false to prune.
  std::function<bool(std::span<const Vertex>)> prune;
};

/// Backtracking search for an injective map of pattern vertices 0..t-1 into H
/// carrying every listed edge onto an edge of H. Pattern vertices are placed in
/// index order, candidates in ascending index order, so the first embedding
/// found is the lexicographically smallest one.
std::optional<VertexTuple> find_embedding(const Hypergraph& h, std::uint32_t t,
                                          const std::vector<VertexTuple>& pattern_edges,
                                          const EmbeddingOptions& opts = {});

std::optional<VertexTuple> contains_pattern(const Hypergraph& h, const TightPattern& p);

struct PancyclicReport {
  bool pancyclic = false;
  std::vector<std::uint32_t> achieved;  // edge counts c with a cycle found
  std::vector<std::uint32_t> missing;   // edge counts c with no cycle
  std::vector<std::uint32_t> skipped;   // c whose window set degenerates (c(k-l) <= k)
};

/// l-tight cycles on c edges for 3 <= c <= n/(k-l). With stop_at_first_failure
/// the scan ends at the first missing length.
PancyclicReport is_l_pancyclic(const Hypergraph& h, std::uint32_t l, bool stop_at_first_failure = false);

}  // namespace tighthyp
