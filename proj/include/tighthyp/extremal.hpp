#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tighthyp/hypergraph.hpp"
#include "tighthyp/motifs.hpp"

namespace tighthyp {

// Thrown when a search runs out of its node budget. No value is reported.
struct BudgetExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HittingSetCertificate {
  std::uint64_t copies = 0;
  std::uint64_t hitting_set_size = 0;  // tau
  std::uint64_t root_lower_bound = 0;  // greedy disjoint-copy packing at the root
  std::uint64_t greedy_upper_bound = 0;
  std::uint64_t nodes = 0;
};

struct ExtremalResult {
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  std::string pattern;  // TightPattern::describe()
  std::uint64_t value = 0;
  Hypergraph witness{1, 1};
  std::vector<VertexTuple> hitting_set;  // C(n,k) - value edges
  HittingSetCertificate certificate;
  bool from_cache = false;
};

struct ExtremalOptions {
  std::uint64_t node_budget = 0;  // 0 = unlimited
  std::uint64_t max_copies = 5'000'000;
  std::string cache_path;  // empty: no cache
  unsigned threads = 1;    // forwarded to witness validation
};

// Packing bound is recomputed on nodes whose index is a multiple of this.
inline constexpr std::uint64_t kPackingBoundInterval = 64;

/// ex(n, P) = C(n,k) - tau, tau the minimum number of edges of K_n^(k) meeting
/// every copy of P. Throws BudgetExhausted, std::length_error (too many copies)
/// and std::invalid_argument for patterns without edges.
ExtremalResult exact_ex(std::uint32_t n, const TightPattern& p, const ExtremalOptions& opts = {});

/// C(n-1,k) + ex(n-1, P(k,l)).
std::uint64_t theorem1_rhs(std::uint32_t n, std::uint32_t k, std::uint32_t l, const ExtremalOptions& opts = {});

struct NamedBound {
  std::string name;  // kk-general, kk-k3, tuza-steiner, tuza-partial, gkl-lower-leading, gkl-upper
  bool lower = true;
  double value = 0;
};

/// Closed-form bounds on ex(n, C(k,l,n)) that apply to the parameters.
/// Inapplicable bounds are left out. `p` enables the partial Steiner bound.
std::vector<NamedBound> known_bounds(std::uint32_t n, std::uint32_t k, std::uint32_t l,
                                     std::optional<double> p = std::nullopt);

struct ThresholdResult {
  std::uint32_t n = 0, k = 0, l = 0, d = 0;
  std::uint64_t value = 0;      // h^l_d(k,n)
  Hypergraph witness{1, 1};     // delta_d = value - 1, no l-tight Hamiltonian cycle
  std::uint64_t graphs_checked = 0;
  std::uint64_t solver_calls = 0;
};

inline constexpr std::uint64_t kExactHMaxKSets = 24;

/// Smallest h such that every n-vertex k-graph with delta_d >= h has an l-tight
/// Hamiltonian cycle, by sweeping all labelled graphs level by level from the
/// top value of delta_d downwards. Requires C(n,k) <= kExactHMaxKSets.
ThresholdResult exact_h(std::uint32_t n, std::uint32_t k, std::uint32_t l, std::uint32_t d,
                        const ExtremalOptions& opts = {});

}  // namespace tighthyp
