#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace tighthyp {

using Vertex = std::uint32_t;
using VertexTuple = std::vector<Vertex>;

/// Largest supported uniformity. Keeps per-edge scratch buffers on the stack.
inline constexpr int kMaxUniformity = 16;

/// Binomial coefficient; throws std::overflow_error when the value does not fit.
std::uint64_t binom(std::uint64_t n, std::uint64_t k);

/// Same as binom() but saturates at UINT64_MAX instead of throwing.
std::uint64_t binom_saturating(std::uint64_t n, std::uint64_t k);

// Table of C(a, b) for a <= n, b <= k. Used for colex ranking of b-subsets.
class BinomialTable {
public:
  BinomialTable() = default;
  BinomialTable(std::uint32_t n, std::uint32_t k);

  std::uint64_t operator()(std::uint32_t a, std::uint32_t b) const {
    if (b > k_ || a > n_) return binom(a, b);
    return table_[static_cast<std::size_t>(b) * (n_ + 1) + a];
  }

  std::uint32_t n() const { return n_; }
  std::uint32_t k() const { return k_; }

private:
  std::uint32_t n_ = 0;
  std::uint32_t k_ = 0;
  std::vector<std::uint64_t> table_;
};

// Colex rank of a strictly increasing subset: sum_i C(s_i, i+1).
inline std::uint64_t colex_rank(std::span<const Vertex> sorted, const BinomialTable& table) {
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) r += table(sorted[i], static_cast<std::uint32_t>(i + 1));
  return r;
}

/// Inverse of colex_rank for subsets of size `size`, written into `out` in increasing order.
void colex_unrank(std::uint64_t rank, std::uint32_t size, const BinomialTable& table, std::span<Vertex> out);

/// Advances `comb` (strictly increasing, values < n) to the next combination in
/// lexicographic order. Returns false after the last combination.
bool next_combination(std::span<Vertex> comb, std::uint32_t n);

/// Calls fn(span) for every size-`size` subset of {0..n-1}, lexicographic order.
template <typename Fn>
void for_each_subset(std::uint32_t n, std::uint32_t size, Fn&& fn) {
  if (size > n) return;
  std::vector<Vertex> comb(size);
  for (std::uint32_t i = 0; i < size; ++i) comb[i] = i;
  do {
    fn(std::span<const Vertex>(comb));
  } while (next_combination(comb, n));
}

// True when all entries are pairwise distinct (small tuples, quadratic scan).
inline bool all_distinct(std::span<const Vertex> t) {
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j)
      if (t[i] == t[j]) return false;
  return true;
}

}  // namespace tighthyp
