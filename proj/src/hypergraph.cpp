#include "tighthyp/hypergraph.hpp"

#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tighthyp {

Hypergraph::Hypergraph(std::uint32_t n, std::uint32_t k, std::uint64_t table_cap_bits) : n_(n), k_(k) {
  if (k < 1) throw std::invalid_argument("uniformity must be at least 1");
  if (k > static_cast<std::uint32_t>(kMaxUniformity)) throw std::invalid_argument("uniformity exceeds supported maximum");
  binom_ = std::make_shared<BinomialTable>(n, k);
  total_ksets_ = binom(n, k);
  if (total_ksets_ <= table_cap_bits) bits_.assign((total_ksets_ + 63) / 64, 0);
}

void Hypergraph::check_vertices(std::span<const Vertex> e, Vertex* sorted_out) const {
  if (e.size() != k_) throw std::invalid_argument("edge size differs from uniformity");
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] >= n_) throw std::invalid_argument("edge vertex out of range");
    sorted_out[i] = e[i];
  }
  std::sort(sorted_out, sorted_out + e.size());
  for (std::size_t i = 1; i < e.size(); ++i)
    if (sorted_out[i] == sorted_out[i - 1]) throw std::invalid_argument("edge has repeated vertex");
}

bool Hypergraph::has_rank(std::uint64_t rank) const {
  if (!bits_.empty()) return (bits_[rank >> 6] >> (rank & 63)) & 1;
  return hashed_.count(rank) != 0;
}

bool Hypergraph::add_rank(std::uint64_t rank) {
  if (rank >= total_ksets_) throw std::invalid_argument("rank out of range");
  bool inserted;
  if (!bits_.empty()) {
    std::uint64_t& w = bits_[rank >> 6];
    const std::uint64_t mask = std::uint64_t{1} << (rank & 63);
    inserted = (w & mask) == 0;
    w |= mask;
  } else {
    inserted = hashed_.insert(rank).second;
  }
  if (inserted) ++edge_count_;
  return inserted;
}

bool Hypergraph::add_edge(std::span<const Vertex> e) {
  Vertex buf[kMaxUniformity];
  check_vertices(e, buf);
  return add_rank(rank_of_sorted(std::span<const Vertex>(buf, k_)));
}

bool Hypergraph::remove_edge(std::span<const Vertex> e) {
  Vertex buf[kMaxUniformity];
  check_vertices(e, buf);
  const std::uint64_t r = rank_of_sorted(std::span<const Vertex>(buf, k_));
  bool removed;
  if (!bits_.empty()) {
    std::uint64_t& w = bits_[r >> 6];
    const std::uint64_t mask = std::uint64_t{1} << (r & 63);
    removed = (w & mask) != 0;
    w &= ~mask;
  } else {
    removed = hashed_.erase(r) != 0;
  }
  if (removed) --edge_count_;
  return removed;
}

bool Hypergraph::has_edge(std::span<const Vertex> e) const {
  Vertex buf[kMaxUniformity];
  check_vertices(e, buf);
  return has_rank(rank_of_sorted(std::span<const Vertex>(buf, k_)));
}

std::vector<VertexTuple> Hypergraph::edges() const {
  std::vector<VertexTuple> out;
  out.reserve(edge_count_);
  for_each_edge([&](std::span<const Vertex> e) { out.emplace_back(e.begin(), e.end()); });
  std::sort(out.begin(), out.end());
  return out;
}

bool Hypergraph::operator==(const Hypergraph& other) const {
  if (n_ != other.n_ || k_ != other.k_ || edge_count_ != other.edge_count_) return false;
  bool same = true;
  for_each_edge([&](std::span<const Vertex> e) {
    if (same && !other.has_rank(rank_of_sorted(e))) same = false;
  });
  return same;
}

Hypergraph complete(std::uint32_t n, std::uint32_t k) {
  if (k < 2) throw std::invalid_argument("complete: uniformity must be at least 2");
  if (k > n) throw std::invalid_argument("complete: uniformity exceeds vertex count");
  Hypergraph h(n, k);
  for (std::uint64_t r = 0; r < h.kset_count(); ++r) h.add_rank(r);
  return h;
}

Hypergraph random_graph(std::uint32_t n, std::uint32_t k, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("random_graph: p must lie in [0, 1]");
  Hypergraph h(n, k);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::uint64_t r = 0; r < h.kset_count(); ++r)
    if (coin(rng) < p) h.add_rank(r);
  return h;
}

Hypergraph induced(const Hypergraph& h, std::span<const Vertex> keep) {
  std::vector<std::int64_t> relabel(h.n(), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] >= h.n()) throw std::invalid_argument("induced: vertex out of range");
    if (i > 0 && keep[i] <= keep[i - 1]) throw std::invalid_argument("induced: keep must be sorted and distinct");
    relabel[keep[i]] = static_cast<std::int64_t>(i);
  }
  Hypergraph out(static_cast<std::uint32_t>(keep.size()), h.k());
  Vertex buf[kMaxUniformity];
  h.for_each_edge([&](std::span<const Vertex> e) {
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (relabel[e[i]] < 0) return;
      buf[i] = static_cast<Vertex>(relabel[e[i]]);
    }
    out.add_rank(out.rank_of_sorted(std::span<const Vertex>(buf, e.size())));
  });
  return out;
}

Hypergraph complement(const Hypergraph& h) {
  Hypergraph out(h.n(), h.k());
  for (std::uint64_t r = 0; r < h.kset_count(); ++r)
    if (!h.has_rank(r)) out.add_rank(r);
  return out;
}

std::uint64_t degree(const Hypergraph& h, std::span<const Vertex> s) {
  const std::uint32_t d = static_cast<std::uint32_t>(s.size());
  if (d < 1 || d >= h.k()) throw std::invalid_argument("degree: set size must lie in [1, k-1]");
  std::vector<char> in_s(h.n(), 0);
  for (Vertex v : s) {
    if (v >= h.n()) throw std::invalid_argument("degree: vertex out of range");
    if (in_s[v]) throw std::invalid_argument("degree: repeated vertex");
    in_s[v] = 1;
  }
  std::vector<Vertex> rest;
  rest.reserve(h.n() - d);
  for (Vertex v = 0; v < h.n(); ++v)
    if (!in_s[v]) rest.push_back(v);

  const std::uint32_t need = h.k() - d;
  std::uint64_t count = 0;
  Vertex buf[kMaxUniformity];
  for_each_subset(static_cast<std::uint32_t>(rest.size()), need, [&](std::span<const Vertex> idx) {
    std::size_t m = 0;
    for (Vertex v : s) buf[m++] = v;
    for (Vertex i : idx) buf[m++] = rest[i];
    std::sort(buf, buf + m);
    if (h.has_rank(h.rank_of_sorted(std::span<const Vertex>(buf, m)))) ++count;
  });
  return count;
}

std::vector<std::uint64_t> all_degrees(const Hypergraph& h, std::uint32_t d) {
  if (d < 1 || d >= h.k()) throw std::invalid_argument("all_degrees: d must lie in [1, k-1]");
  const BinomialTable table(h.n(), d);
  std::vector<std::uint64_t> deg(binom(h.n(), d), 0);
  Vertex sub[kMaxUniformity];
  h.for_each_edge([&](std::span<const Vertex> e) {
    for_each_subset(static_cast<std::uint32_t>(e.size()), d, [&](std::span<const Vertex> idx) {
      for (std::size_t i = 0; i < idx.size(); ++i) sub[i] = e[idx[i]];
      ++deg[colex_rank(std::span<const Vertex>(sub, d), table)];
    });
  });
  return deg;
}

std::uint64_t min_degree(const Hypergraph& h, std::uint32_t d) {
  if (d >= h.k()) throw std::invalid_argument("min_degree: d must lie in [0, k-1]");
  if (d == 0) return h.edge_count();
  if (d > h.n()) return 0;
  const auto deg = all_degrees(h, d);
  return *std::min_element(deg.begin(), deg.end());
}

Link link(const Hypergraph& h, Vertex v) {
  if (v >= h.n()) throw std::invalid_argument("link: vertex out of range");
  if (h.k() < 2) throw std::invalid_argument("link: uniformity must be at least 2");
  Link out{Hypergraph(h.n() - 1, h.k() - 1), {}};
  out.to_original.reserve(h.n() - 1);
  for (Vertex u = 0; u < h.n(); ++u)
    if (u != v) out.to_original.push_back(u);

  // Enumerate (k-1)-subsets of the link vertex set and test {v} + subset.
  Vertex buf[kMaxUniformity];
  const std::uint32_t m = h.n() - 1;
  const std::uint32_t km1 = h.k() - 1;
  for_each_subset(m, km1, [&](std::span<const Vertex> idx) {
    std::size_t j = 0;
    bool placed = false;
    for (Vertex i : idx) {
      const Vertex orig = out.to_original[i];
      if (!placed && v < orig) {
        buf[j++] = v;
        placed = true;
      }
      buf[j++] = orig;
    }
    if (!placed) buf[j++] = v;
    if (h.has_rank(h.rank_of_sorted(std::span<const Vertex>(buf, j))))
      out.graph.add_rank(out.graph.rank_of_sorted(idx));
  });
  return out;
}

std::string canonical_code(const Hypergraph& h) {
  if (h.n() > kCanonicalMaxVertices) throw std::invalid_argument("canonical_code: n exceeds 10");
  const std::uint32_t n = h.n();
  const std::uint32_t k = h.k();
  const auto edges = h.edges();

  std::vector<Vertex> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::uint64_t> best, cur(edges.size());
  Vertex buf[kMaxUniformity];
  do {
    for (std::size_t i = 0; i < edges.size(); ++i) {
      for (std::uint32_t j = 0; j < k; ++j) buf[j] = perm[edges[i][j]];
      std::sort(buf, buf + k);
      cur[i] = h.rank_of_sorted(std::span<const Vertex>(buf, k));
    }
    // Descending rank lists compare like the bitmaps they encode.
    std::sort(cur.begin(), cur.end(), std::greater<>());
    if (best.empty() || cur < best) best = cur;
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::string code;
  code.push_back(static_cast<char>(n));
  code.push_back(static_cast<char>(k));
  std::string bitmap((h.kset_count() + 7) / 8, '\0');
  for (auto r : best) bitmap[r >> 3] = static_cast<char>(bitmap[r >> 3] | (1 << (r & 7)));
  code += bitmap;
  return code;
}

void write_text(std::ostream& os, const Hypergraph& h) {
  os << h.n() << ' ' << h.k() << '\n';
  for (const auto& e : h.edges()) {
    for (std::size_t i = 0; i < e.size(); ++i) os << (i ? " " : "") << e[i];
    os << '\n';
  }
}

Hypergraph read_text(std::istream& is) {
  std::string line;
  bool have_header = false;
  Hypergraph h;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    if (!have_header) {
      long long n = -1, k = -1;
      if (!(ls >> n >> k) || n < 0 || k < 1 || n > std::numeric_limits<std::uint32_t>::max())
        throw std::runtime_error("read_text: bad header on line " + std::to_string(lineno));
      h = Hypergraph(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(k));
      have_header = true;
      continue;
    }
    std::vector<Vertex> e;
    long long v;
    while (ls >> v) {
      if (v < 0) throw std::runtime_error("read_text: negative vertex on line " + std::to_string(lineno));
      e.push_back(static_cast<Vertex>(v));
    }
    if (!ls.eof()) throw std::runtime_error("read_text: unparsable token on line " + std::to_string(lineno));
    try {
      if (!h.add_edge(e)) throw std::invalid_argument("duplicate edge");
    } catch (const std::invalid_argument& err) {
      throw std::runtime_error("read_text: line " + std::to_string(lineno) + ": " + err.what());
    }
  }
  if (!have_header) throw std::runtime_error("read_text: missing header");
  return h;
}

void save_text(const std::string& path, const Hypergraph& h) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_text(os, h);
  if (!os) throw std::runtime_error("write failed for " + path);
}

Hypergraph load_text(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_text(is);
}

}  // namespace tighthyp
