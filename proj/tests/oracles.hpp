#pragma once

// Brute-force reference implementations. They share no code with the library
// beyond the Hypergraph container used to hand graphs over.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "tighthyp/hypergraph.hpp"
#include "tighthyp/motifs.hpp"

namespace oracle {

using tighthyp::Hypergraph;
using tighthyp::Vertex;
using tighthyp::VertexTuple;

// k-subsets of {0..n-1} in lexicographic order, indexed.
struct KSets {
  std::uint32_t n, k;
  std::vector<VertexTuple> sets;
  std::map<VertexTuple, std::uint32_t> index;

  KSets(std::uint32_t n_, std::uint32_t k_) : n(n_), k(k_) {
    VertexTuple cur;
    build(0, cur);
    for (std::uint32_t i = 0; i < sets.size(); ++i) index[sets[i]] = i;
  }

  std::uint32_t of(VertexTuple e) const {
    std::sort(e.begin(), e.end());
    return index.at(e);
  }

private:
  void build(Vertex from, VertexTuple& cur) {
    if (cur.size() == k) {
      sets.push_back(cur);
      return;
    }
    for (Vertex v = from; v < n; ++v) {
      cur.push_back(v);
      build(v + 1, cur);
      cur.pop_back();
    }
  }
};

inline std::set<VertexTuple> edge_set(const Hypergraph& h) {
  std::set<VertexTuple> s;
  for (auto& e : h.edges()) s.insert(e);
  return s;
}

inline bool windows_ok(const std::set<VertexTuple>& edges, const VertexTuple& ord, std::uint32_t k, std::uint32_t l,
                       std::size_t phase = 0) {
  const std::size_t n = ord.size();
  for (std::size_t start = phase; start < n + phase; start += k - l) {
    VertexTuple w;
    for (std::uint32_t j = 0; j < k; ++j) w.push_back(ord[(start + j) % n]);
    std::sort(w.begin(), w.end());
    if (!edges.count(w)) return false;
  }
  return true;
}

// Any l-tight Hamiltonian cycle: every ordering that starts at 0, with windows
// starting at each of the k-l phases.
inline bool has_ham_cycle(const Hypergraph& h, std::uint32_t l) {
  const std::uint32_t n = h.n(), k = h.k();
  if (n < k || n % (k - l) != 0) return false;
  const auto edges = edge_set(h);
  VertexTuple ord(n);
  std::iota(ord.begin(), ord.end(), 0);
  do {
    for (std::size_t phase = 0; phase < k - l; ++phase)
      if (windows_ok(edges, ord, k, l, phase)) return true;
  } while (std::next_permutation(ord.begin() + 1, ord.end()));
  return false;
}

// Edge masks (over KSets indices) of every copy of p in K_n, deduplicated.
inline std::vector<std::uint64_t> copy_masks(const KSets& ks, const tighthyp::TightPattern& p) {
  const auto pedges = p.edges();
  std::set<std::uint64_t> masks;
  std::vector<Vertex> pick(ks.n);
  std::iota(pick.begin(), pick.end(), 0);
  // injective maps of p.t pattern vertices: all permutations, first t entries
  std::set<VertexTuple> seen_prefix;
  do {
    VertexTuple img(pick.begin(), pick.begin() + p.t);
    if (!seen_prefix.insert(img).second) continue;
    std::uint64_t m = 0;
    for (auto& e : pedges) {
      VertexTuple mapped;
      for (auto v : e) mapped.push_back(img[v]);
      m |= std::uint64_t{1} << ks.of(mapped);
    }
    masks.insert(m);
  } while (std::next_permutation(pick.begin(), pick.end()));
  return {masks.begin(), masks.end()};
}

struct SweepResult {
  std::uint64_t value = 0;
  std::uint64_t witness = 0;
};

// Largest copy-free edge mask over all 2^C(n,k) graphs.
inline SweepResult sweep_ex(const KSets& ks, const std::vector<std::uint64_t>& copies) {
  const std::uint32_t m = static_cast<std::uint32_t>(ks.sets.size());
  SweepResult best;
  for (std::uint64_t g = 0; g < (std::uint64_t{1} << m); ++g) {
    const auto pc = static_cast<std::uint64_t>(__builtin_popcountll(g));
    if (pc <= best.value && g != 0) continue;
    bool free = true;
    for (auto c : copies)
      if ((c & g) == c) {
        free = false;
        break;
      }
    if (free && (pc > best.value || g == 0)) best = {pc, g};
  }
  return best;
}

inline Hypergraph from_mask(const KSets& ks, std::uint64_t mask) {
  Hypergraph h(ks.n, ks.k);
  for (std::uint32_t i = 0; i < ks.sets.size(); ++i)
    if (mask >> i & 1) h.add_edge(ks.sets[i]);
  return h;
}

inline std::uint64_t to_mask(const KSets& ks, const Hypergraph& h) {
  std::uint64_t m = 0;
  for (auto& e : h.edges()) m |= std::uint64_t{1} << ks.of(e);
  return m;
}

// Degree of the set s, by scanning all edges.
inline std::uint64_t degree(const Hypergraph& h, const VertexTuple& s) {
  std::uint64_t d = 0;
  for (auto& e : h.edges())
    if (std::all_of(s.begin(), s.end(), [&](Vertex v) { return std::find(e.begin(), e.end(), v) != e.end(); })) ++d;
  return d;
}

// Dirac-type threshold for k = 2, l = 1, d = 1: least delta_1 forcing a
// Hamiltonian cycle, over all graphs on n vertices.
inline std::uint64_t sweep_dirac(std::uint32_t n) {
  KSets ks(n, 2);
  const std::uint32_t m = static_cast<std::uint32_t>(ks.sets.size());
  std::uint64_t worst = 0;  // largest min degree of a non-Hamiltonian graph, plus one
  for (std::uint64_t g = 0; g < (std::uint64_t{1} << m); ++g) {
    std::vector<std::uint32_t> deg(n, 0);
    for (std::uint32_t i = 0; i < m; ++i)
      if (g >> i & 1) {
        ++deg[ks.sets[i][0]];
        ++deg[ks.sets[i][1]];
      }
    const std::uint64_t md = *std::min_element(deg.begin(), deg.end());
    if (md + 1 <= worst) continue;
    if (!has_ham_cycle(from_mask(ks, g), 1)) worst = md + 1;
  }
  return worst;
}

}  // namespace oracle
