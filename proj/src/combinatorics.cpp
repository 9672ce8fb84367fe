#include "tighthyp/combinatorics.hpp"

#include <limits>

namespace tighthyp {

namespace {

bool binom_impl(std::uint64_t n, std::uint64_t k, std::uint64_t& out) {
  if (k > n) {
    out = 0;
    return true;
  }
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) return false;
  }
  out = static_cast<std::uint64_t>(r);
  return true;
}

}  // namespace

std::uint64_t binom(std::uint64_t n, std::uint64_t k) {
  std::uint64_t out = 0;
  if (!binom_impl(n, k, out)) throw std::overflow_error("binomial coefficient overflows 64 bits");
  return out;
}

std::uint64_t binom_saturating(std::uint64_t n, std::uint64_t k) {
  std::uint64_t out = 0;
  if (!binom_impl(n, k, out)) return std::numeric_limits<std::uint64_t>::max();
  return out;
}

BinomialTable::BinomialTable(std::uint32_t n, std::uint32_t k) : n_(n), k_(k) {
  table_.assign(static_cast<std::size_t>(k + 1) * (n + 1), 0);
  for (std::uint32_t b = 0; b <= k; ++b)
    for (std::uint32_t a = 0; a <= n; ++a) table_[static_cast<std::size_t>(b) * (n + 1) + a] = binom_saturating(a, b);
}

void colex_unrank(std::uint64_t rank, std::uint32_t size, const BinomialTable& table, std::span<Vertex> out) {
  // Greedy: the largest element s_{i} is the largest c with C(c, i+1) <= rank.
  std::uint32_t hi = table.n();
  for (std::uint32_t i = size; i-- > 0;) {
    // binary search in [i, hi): C(., i+1) is nondecreasing in its first argument
    std::uint32_t lo = i, top = hi;
    while (top - lo > 1) {
      const std::uint32_t mid = lo + (top - lo) / 2;
      if (table(mid, i + 1) <= rank) lo = mid;
      else top = mid;
    }
    out[i] = lo;
    rank -= table(lo, i + 1);
    hi = lo;
  }
}

bool next_combination(std::span<Vertex> comb, std::uint32_t n) {
  const std::size_t k = comb.size();
  if (k == 0) return false;
  std::size_t i = k;
  while (i-- > 0) {
    if (comb[i] < n - k + i) {
      ++comb[i];
      for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace tighthyp
