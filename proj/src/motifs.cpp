#include "tighthyp/motifs.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tighthyp {

namespace {

bool cycle_windows_distinct(std::uint32_t k, std::uint32_t l, std::uint32_t t) {
  return t > k || t / (k - l) == 1;
}

}  // namespace

std::vector<VertexTuple> TightPattern::edges() const {
  std::vector<VertexTuple> out;
  const std::uint64_t m = edge_count();
  out.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    VertexTuple e(k);
    for (std::uint32_t j = 0; j < k; ++j) {
      const std::uint64_t pos = i * stride() + j;
      e[j] = static_cast<Vertex>(kind == PatternKind::cycle ? pos % t : pos);
    }
    std::sort(e.begin(), e.end());
    out.push_back(std::move(e));
  }
  return out;
}

std::string TightPattern::describe() const {
  std::ostringstream os;
  os << (kind == PatternKind::path ? "path" : "cycle") << ' ' << k << ' ' << l << ' ' << t;
  return os.str();
}

TightPattern build_pattern(PatternKind kind, std::uint32_t k, std::uint32_t l, std::uint32_t t) {
  if (k < 1 || k > static_cast<std::uint32_t>(kMaxUniformity)) throw std::invalid_argument("pattern: uniformity out of range");
  if (l >= k) throw std::invalid_argument("pattern: tightness must be smaller than uniformity");
  const std::uint32_t s = k - l;
  if (kind == PatternKind::path) {
    if (t < l || t == 0) throw std::invalid_argument("pattern: path needs at least l vertices");
    if ((t - l) % s != 0) throw std::invalid_argument("pattern: (k-l) must divide (t-l) for a path");
  } else {
    if (t % s != 0 || t == 0) throw std::invalid_argument("pattern: (k-l) must divide t for a cycle");
    if (t < k) throw std::invalid_argument("pattern: cycle needs at least k vertices");
    if (!cycle_windows_distinct(k, l, t)) throw std::invalid_argument("pattern: cycle windows coincide (t <= k)");
  }
  return TightPattern{kind, k, l, t};
}

TightPattern build_P(std::uint32_t k, std::uint32_t l) {
  if (k < 2) throw std::invalid_argument("build_P: k must be at least 2");
  if (l >= k) throw std::invalid_argument("build_P: l must lie in [0, k-1]");
  const std::uint32_t s = k - l;
  const std::uint32_t q = k / s;
  if (l == 0) {
    // Single (k-1)-edge; tightness is vacuous for a one-edge path.
    return build_pattern(PatternKind::path, k - 1, 0, k - 1);
  }
  const std::uint32_t t = q * s + l - 1;
  TightPattern p = build_pattern(PatternKind::path, k - 1, l - 1, t);
  if (p.edge_count() != q) throw std::logic_error("build_P: edge count differs from floor(k/(k-l))");
  return p;
}

void write_pattern(std::ostream& os, const TightPattern& p) {
  os << p.describe() << '\n';
  Hypergraph g(p.t, p.k);
  for (const auto& e : p.edges()) g.add_edge(e);
  write_text(os, g);
}

TightPattern read_pattern(std::istream& is) {
  std::string line;
  while (std::getline(is, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    break;
  }
  std::istringstream ls(line);
  std::string kind;
  long long k = -1, l = -1, t = -1;
  if (!(ls >> kind >> k >> l >> t) || k < 1 || l < 0 || t < 0)
    throw std::runtime_error("read_pattern: bad pattern header");
  PatternKind pk;
  if (kind == "path") pk = PatternKind::path;
  else if (kind == "cycle") pk = PatternKind::cycle;
  else throw std::runtime_error("read_pattern: unknown kind '" + kind + "'");
  const TightPattern p = build_pattern(pk, static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(l),
                                      static_cast<std::uint32_t>(t));
  const Hypergraph g = read_text(is);
  Hypergraph expect(p.t, p.k);
  for (const auto& e : p.edges()) expect.add_edge(e);
  if (!(g == expect)) throw std::runtime_error("read_pattern: edge list does not match header");
  return p;
}

bool is_l_tight_ham_cycle(const Hypergraph& h, std::span<const Vertex> ordering, std::uint32_t l) {
  const std::uint32_t n = h.n(), k = h.k();
  if (l >= k) throw std::invalid_argument("is_l_tight_ham_cycle: l must be smaller than k");
  if (ordering.size() != n) throw std::invalid_argument("is_l_tight_ham_cycle: ordering must list every vertex");
  std::vector<char> seen(n, 0);
  for (Vertex v : ordering) {
    if (v >= n || seen[v]) throw std::invalid_argument("is_l_tight_ham_cycle: ordering is not a permutation");
    seen[v] = 1;
  }
  const std::uint32_t s = k - l;
  if (n == 0 || n % s != 0) throw std::invalid_argument("is_l_tight_ham_cycle: (k-l) must divide n");
  if (n < k) return false;
  Vertex buf[kMaxUniformity];
  for (std::uint32_t i = 0; i < n / s; ++i) {
    for (std::uint32_t j = 0; j < k; ++j) buf[j] = ordering[(static_cast<std::uint64_t>(i) * s + j) % n];
    if (!h.has_edge(std::span<const Vertex>(buf, k))) return false;
  }
  return true;
}

double GoodTupleParams::default_epsilon(std::uint32_t k) {
  if (k < 2) throw std::invalid_argument("default_epsilon: k must be at least 2");
  const long double base = 1280.0L * k * k * k;
  return static_cast<double>(1.0L / (22.0L * std::pow(base, static_cast<long double>(k - 1))));
}

GoodTupleParams GoodTupleParams::from_epsilon(std::uint32_t k, double epsilon) {
  if (k < 2) throw std::invalid_argument("GoodTupleParams: k must be at least 2");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("GoodTupleParams: epsilon must lie in (0, 1)");
  const double rho = static_cast<double>(std::pow(22.0L * epsilon, 1.0L / (k - 1)));
  return GoodTupleParams{epsilon, rho};
}

long double good_threshold(std::uint64_t n, std::uint32_t k, std::uint32_t i, double rho) {
  if (n < i) return 0.0L;
  const long double full = static_cast<long double>(binom_saturating(n - i, k - i));
  return (1.0L - std::pow(static_cast<long double>(rho), static_cast<long double>(k - i))) * full;
}

bool is_good_tuple(const Hypergraph& h, std::span<const Vertex> x, const GoodTupleParams& params) {
  const std::uint32_t k = h.k();
  if (x.size() != k - 1) throw std::invalid_argument("is_good_tuple: tuple length must be k-1");
  for (Vertex v : x)
    if (v >= h.n()) throw std::invalid_argument("is_good_tuple: vertex out of range");
  if (!all_distinct(x)) return false;
  for (std::uint32_t i = 1; i <= k - 1; ++i) {
    const std::uint64_t deg = degree(h, x.subspan(0, i));
    if (!meets_threshold(deg, good_threshold(h.n(), k, i, params.rho))) return false;
  }
  return true;
}

namespace {

class Embedder {
public:
  Embedder(const Hypergraph& h, std::uint32_t t, const std::vector<VertexTuple>& edges, const EmbeddingOptions& opts)
      : h_(h), t_(t), opts_(opts), check_at_(t), map_(t), used_(h.n(), 0) {
    for (const auto& e : edges) {
      if (e.size() != h.k()) throw std::invalid_argument("find_embedding: pattern uniformity differs from host");
      Vertex last = 0;
      for (Vertex v : e) {
        if (v >= t) throw std::invalid_argument("find_embedding: pattern vertex out of range");
        last = std::max(last, v);
      }
      check_at_[last].push_back(&e);
    }
  }

  std::optional<VertexTuple> run() {
    if (t_ > h_.n()) return std::nullopt;
    if (t_ == 0) return VertexTuple{};
    if (place(0)) return map_;
    return std::nullopt;
  }

private:
  bool place(std::uint32_t pos) {
    if (pos == t_) return true;
    Vertex buf[kMaxUniformity];
    for (Vertex v = 0; v < h_.n(); ++v) {
      if (used_[v] || (!opts_.allowed.empty() && !opts_.allowed[v])) continue;
      map_[pos] = v;
      bool ok = true;
      for (const VertexTuple* e : check_at_[pos]) {
        for (std::size_t j = 0; j < e->size(); ++j) buf[j] = map_[(*e)[j]];
        std::sort(buf, buf + e->size());
        if (!h_.has_rank(h_.rank_of_sorted(std::span<const Vertex>(buf, e->size())))) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      if (opts_.prune && !opts_.prune(std::span<const Vertex>(map_.data(), pos + 1))) continue;
      used_[v] = 1;
      if (place(pos + 1)) return true;
      used_[v] = 0;
    }
    return false;
  }

  const Hypergraph& h_;
  std::uint32_t t_;
  const EmbeddingOptions& opts_;
  std::vector<std::vector<const VertexTuple*>> check_at_;
  VertexTuple map_;
  std::vector<char> used_;
};

}  // namespace

std::optional<VertexTuple> find_embedding(const Hypergraph& h, std::uint32_t t,
                                          const std::vector<VertexTuple>& pattern_edges,
                                          const EmbeddingOptions& opts) {
  return Embedder(h, t, pattern_edges, opts).run();
}

std::optional<VertexTuple> contains_pattern(const Hypergraph& h, const TightPattern& p) {
  if (p.k != h.k()) throw std::invalid_argument("contains_pattern: pattern uniformity differs from host");
  const auto edges = p.edges();
  return find_embedding(h, p.t, edges);
}

PancyclicReport is_l_pancyclic(const Hypergraph& h, std::uint32_t l, bool stop_at_first_failure) {
  const std::uint32_t k = h.k();
  if (k < 2) throw std::invalid_argument("is_l_pancyclic: k must be at least 2");
  if (l >= k) throw std::invalid_argument("is_l_pancyclic: l must be smaller than k");
  const std::uint32_t s = k - l;
  PancyclicReport report;
  for (std::uint32_t c = 3; c <= h.n() / s; ++c) {
    const std::uint32_t t = c * s;
    if (!cycle_windows_distinct(k, l, t) || t < k) {
      report.skipped.push_back(c);
      continue;
    }
    if (contains_pattern(h, build_pattern(PatternKind::cycle, k, l, t))) {
      report.achieved.push_back(c);
    } else {
      report.missing.push_back(c);
      if (stop_at_first_failure) break;
    }
  }
  report.pancyclic = report.missing.empty();
  return report;
}

}  // namespace tighthyp
