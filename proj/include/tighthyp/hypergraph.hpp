#pragma once

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "tighthyp/combinatorics.hpp"

namespace tighthyp {

// k-uniform hypergraph on vertices 0..n-1.
//
// Edge membership is a bit table indexed by the colex rank of the sorted
// k-set. When C(n, k) exceeds the configured cap the graph falls back to a
// hash set of ranks. Uniformity 1 is allowed so that links of 2-graphs are
// representable; complete() still insists on k >= 2.
class Hypergraph {
public:
  /// Default cap on the bit table, in bits (32 MiB).
  static constexpr std::uint64_t kDefaultTableCapBits = std::uint64_t{1} << 28;

  Hypergraph() = default;
  Hypergraph(std::uint32_t n, std::uint32_t k, std::uint64_t table_cap_bits = kDefaultTableCapBits);

  std::uint32_t n() const { return n_; }
  std::uint32_t k() const { return k_; }
  std::uint64_t edge_count() const { return edge_count_; }
  std::uint64_t non_edge_count() const { return total_ksets_ - edge_count_; }
  /// C(n, k).
  std::uint64_t kset_count() const { return total_ksets_; }
  bool uses_rank_table() const { return !bits_.empty() || total_ksets_ == 0; }

  // Edge operations accept vertices in any order; they must be k distinct
  // vertices in range (std::invalid_argument otherwise).
  bool add_edge(std::span<const Vertex> e);
  bool remove_edge(std::span<const Vertex> e);
  bool has_edge(std::span<const Vertex> e) const;
  bool add_edge(std::initializer_list<Vertex> e) { return add_edge(std::span<const Vertex>(e.begin(), e.size())); }
  bool remove_edge(std::initializer_list<Vertex> e) { return remove_edge(std::span<const Vertex>(e.begin(), e.size())); }
  bool has_edge(std::initializer_list<Vertex> e) const { return has_edge(std::span<const Vertex>(e.begin(), e.size())); }

  // Rank-level access; `rank` is the colex rank of a sorted k-set.
  bool has_rank(std::uint64_t rank) const;
  bool add_rank(std::uint64_t rank);
  std::uint64_t rank_of_sorted(std::span<const Vertex> sorted) const { return colex_rank(sorted, *binom_); }
  void unrank(std::uint64_t rank, std::span<Vertex> out) const { colex_unrank(rank, k_, *binom_, out); }
  const BinomialTable& binomials() const { return *binom_; }

  /// Calls fn(span<const Vertex>) for every edge (sorted), in colex order.
  template <typename Fn>
  void for_each_edge(Fn&& fn) const;

  /// All edges, each sorted, in lexicographic order.
  std::vector<VertexTuple> edges() const;

  bool operator==(const Hypergraph& other) const;

private:
  void check_vertices(std::span<const Vertex> e, Vertex* sorted_out) const;

  std::uint32_t n_ = 0;
  std::uint32_t k_ = 0;
  std::uint64_t total_ksets_ = 0;
  std::uint64_t edge_count_ = 0;
  std::shared_ptr<const BinomialTable> binom_;
  std::vector<std::uint64_t> bits_;
  std::unordered_set<std::uint64_t> hashed_;
};

template <typename Fn>
void Hypergraph::for_each_edge(Fn&& fn) const {
  Vertex buf[kMaxUniformity];
  std::span<Vertex> out(buf, k_);
  if (!bits_.empty()) {
    for (std::size_t w = 0; w < bits_.size(); ++w) {
      std::uint64_t word = bits_[w];
      while (word) {
        const int b = __builtin_ctzll(word);
        word &= word - 1;
        unrank(static_cast<std::uint64_t>(w) * 64 + b, out);
        fn(std::span<const Vertex>(buf, k_));
      }
    }
  } else {
    std::vector<std::uint64_t> ranks(hashed_.begin(), hashed_.end());
    std::sort(ranks.begin(), ranks.end());
    for (auto r : ranks) {
      unrank(r, out);
      fn(std::span<const Vertex>(buf, k_));
    }
  }
}

// ---- construction ----------------------------------------------------------

/// Complete k-graph; requires 2 <= k <= n.
Hypergraph complete(std::uint32_t n, std::uint32_t k);

/// Each k-set independently with probability p; deterministic in `seed`.
Hypergraph random_graph(std::uint32_t n, std::uint32_t k, double p, std::uint64_t seed);

/// Sub-hypergraph induced on `keep` (sorted, distinct), relabelled 0..|keep|-1
/// in order.
Hypergraph induced(const Hypergraph& h, std::span<const Vertex> keep);

/// The complement within the complete k-graph on the same vertex set.
Hypergraph complement(const Hypergraph& h);

// ---- degrees ---------------------------------------------------------------

/// Number of edges containing the set S (1 <= |S| <= k-1, distinct entries).
std::uint64_t degree(const Hypergraph& h, std::span<const Vertex> s);
inline std::uint64_t degree(const Hypergraph& h, std::initializer_list<Vertex> s) {
  return degree(h, std::span<const Vertex>(s.begin(), s.size()));
}

/// delta_d: minimum degree over all d-sets; delta_0 is the edge count.
std::uint64_t min_degree(const Hypergraph& h, std::uint32_t d);

/// Degrees of every d-set, indexed by the colex rank of the d-set.
std::vector<std::uint64_t> all_degrees(const Hypergraph& h, std::uint32_t d);

// Link of v: the (k-1)-graph on the n-1 other vertices. Vertices are relabelled
// order-preservingly; `to_original[i]` maps link vertex i back to H.
struct Link {
  Hypergraph graph;
  std::vector<Vertex> to_original;
};
Link link(const Hypergraph& h, Vertex v);

// ---- isomorphism -----------------------------------------------------------

/// Largest n accepted by canonical_code().
inline constexpr std::uint32_t kCanonicalMaxVertices = 10;

/// Minimum over all vertex permutations of the edge bitmap, serialized as bytes.
/// Equal codes iff isomorphic. Throws std::invalid_argument for n > 10.
std::string canonical_code(const Hypergraph& h);

// ---- text format -----------------------------------------------------------
//
//   line 1: "n k"; then one edge per line as k space-separated vertices.
//   '#' starts a comment line; blank lines are ignored. Writers emit edges in
//   lexicographic order.

void write_text(std::ostream& os, const Hypergraph& h);
Hypergraph read_text(std::istream& is);
void save_text(const std::string& path, const Hypergraph& h);
Hypergraph load_text(const std::string& path);

}  // namespace tighthyp
