#include "tighthyp/absorb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace tighthyp {

namespace {

void check_strict_constants(std::uint32_t k, const PipelineConfig& cfg) {
  if (cfg.override_constants) return;
  const double cap = 1.0 / (64.0 * k * k);
  if (!(cfg.gamma > 0 && cfg.gamma <= cap)) throw std::invalid_argument("pipeline: gamma must lie in (0, 1/(64k^2])");
  if (!(cfg.beta > 0 && cfg.beta <= cap)) throw std::invalid_argument("pipeline: beta must lie in (0, 1/(64k^2])");
}

// Sorted copy; false on repeated vertices.
bool sorted_window(std::span<const Vertex> w, Vertex* out) {
  std::copy(w.begin(), w.end(), out);
  std::sort(out, out + w.size());
  return std::adjacent_find(out, out + w.size()) == out + w.size();
}

bool contains(std::span<const Vertex> w, Vertex v) { return std::find(w.begin(), w.end(), v) != w.end(); }

std::vector<Vertex> active_list(const DegreeCache& dc) {
  std::vector<Vertex> out;
  for (Vertex v = 0; v < dc.graph().n(); ++v)
    if (dc.active(v)) out.push_back(v);
  return out;
}

VertexTuple reversed_tail(std::span<const Vertex> seq, std::size_t len) {
  return VertexTuple(seq.rbegin(), seq.rbegin() + static_cast<std::ptrdiff_t>(len));
}

// Number of sampled objects: Binomial(trials, p), capped.
std::uint64_t draw_count(long double trials, long double p, std::uint64_t cap, std::mt19937_64& rng) {
  if (trials <= 0 || p <= 0) return 0;
  std::uint64_t count;
  if (trials < 9.0e18L && p < 1) {
    std::binomial_distribution<std::uint64_t> dist(static_cast<std::uint64_t>(trials), static_cast<double>(p));
    count = dist(rng);
  } else {
    std::poisson_distribution<std::uint64_t> dist(static_cast<double>(trials * p));
    count = dist(rng);
  }
  return std::min(count, cap);
}

template <class Edge, class Good>
bool absorbs_impl(std::span<const Vertex> x, Vertex v, std::uint32_t k, Edge&& edge, Good&& good) {
  if (x.size() != 2 * k - 2) throw std::invalid_argument("absorbs: tuple length must be 2k-2");
  if (contains(x, v) || !all_distinct(x)) return false;
  VertexTuple with(x.begin(), x.end());
  with.insert(with.begin() + (k - 1), v);
  for (std::size_t i = 0; i + k <= x.size(); ++i)
    if (!edge(x.subspan(i, k))) return false;
  for (std::size_t i = 0; i + k <= with.size(); ++i)
    if (!edge(std::span<const Vertex>(with).subspan(i, k))) return false;
  const VertexTuple back = reversed_tail(x, k - 1);
  return good(x.first(k - 1)) && good(std::span<const Vertex>(back));
}

template <class Edge>
bool connects_impl(std::span<const Vertex> z, std::span<const Vertex> x, std::span<const Vertex> y, std::uint32_t k,
                   Edge&& edge) {
  VertexTuple seq(x.rbegin(), x.rend());
  seq.insert(seq.end(), z.begin(), z.end());
  seq.insert(seq.end(), y.begin(), y.end());
  for (std::size_t i = 0; i + k <= seq.size(); ++i)
    if (!edge(std::span<const Vertex>(seq).subspan(i, k))) return false;
  return true;
}

}  // namespace

PipelineConfig default_constants(std::uint32_t k) {
  if (k < 2) throw std::invalid_argument("default_constants: k must be at least 2");
  PipelineConfig cfg;
  cfg.params = GoodTupleParams::paper_default(k);
  cfg.gamma = 1.0 / (64.0 * k * k);
  cfg.beta = 1.0 / (1280.0 * k * k * k);
  return cfg;
}

PipelineConfig override_constants(std::uint32_t k, double gamma, double beta, std::optional<double> rho,
                                  std::optional<double> epsilon, std::uint64_t seed) {
  PipelineConfig cfg = default_constants(k);
  cfg.override_constants = true;
  cfg.gamma = gamma;
  cfg.beta = beta;
  cfg.seed = seed;
  if (!(gamma > 0 && gamma <= 1) || !(beta > 0 && beta <= 1)) throw std::invalid_argument("override: gamma and beta must lie in (0, 1]");
  if (rho && !(*rho > 0 && *rho < 1)) throw std::invalid_argument("override: rho must lie in (0, 1)");
  if (epsilon && !(*epsilon > 0 && *epsilon < 1)) throw std::invalid_argument("override: epsilon must lie in (0, 1)");
  if (rho && epsilon) cfg.params = GoodTupleParams{*epsilon, *rho};
  else if (rho) cfg.params = GoodTupleParams{std::pow(*rho, static_cast<double>(k - 1)), *rho};
  else if (epsilon) cfg.params = GoodTupleParams::from_epsilon(k, *epsilon);
  return cfg;
}

// ---- DegreeCache ---------------------------------------------------------------

DegreeCache::DegreeCache(const Hypergraph& h, double rho)
    : DegreeCache(h, std::vector<char>(h.n(), 1), rho) {}

DegreeCache::DegreeCache(const Hypergraph& h, std::vector<char> active, double rho)
    : h_(h), active_(std::move(active)), rho_(rho), table_(h.n(), h.k()) {
  const std::uint32_t n = h.n(), k = h.k();
  if (active_.size() != n) throw std::invalid_argument("DegreeCache: active mask size differs from n");
  if (k < 2) throw std::invalid_argument("DegreeCache: k must be at least 2");
  n_active_ = static_cast<std::uint32_t>(std::count(active_.begin(), active_.end(), 1));
  deg_.resize(k);
  for (std::uint32_t i = 1; i < k; ++i) deg_[i].assign(binom(n, i), 0);
  Vertex sub[kMaxUniformity];
  h.for_each_edge([&](std::span<const Vertex> e) {
    for (Vertex v : e)
      if (!active_[v]) return;
    for (std::uint32_t mask = 1; mask + 1 < (1u << k); ++mask) {
      std::uint32_t len = 0;
      for (std::uint32_t j = 0; j < k; ++j)
        if (mask >> j & 1) sub[len++] = e[j];
      ++deg_[len][colex_rank(std::span<const Vertex>(sub, len), table_)];
    }
  });
  threshold_.assign(k, 0.0L);
  for (std::uint32_t i = 1; i < k; ++i) threshold_[i] = good_threshold(n_active_, k, i, rho);
}

std::uint64_t DegreeCache::degree(std::span<const Vertex> s) const {
  if (s.empty() || s.size() >= h_.k()) throw std::invalid_argument("DegreeCache::degree: size must lie in 1..k-1");
  Vertex buf[kMaxUniformity];
  if (!sorted_window(s, buf)) throw std::invalid_argument("DegreeCache::degree: repeated vertex");
  return deg_[s.size()][colex_rank(std::span<const Vertex>(buf, s.size()), table_)];
}

bool DegreeCache::good(std::span<const Vertex> x) const {
  if (x.size() != h_.k() - 1) throw std::invalid_argument("DegreeCache::good: tuple length must be k-1");
  for (Vertex v : x)
    if (v >= h_.n() || !active_[v]) return false;
  if (!all_distinct(x)) return false;
  for (std::uint32_t i = 1; i < h_.k(); ++i)
    if (!meets_threshold(degree(x.first(i)), threshold_[i])) return false;
  return true;
}

bool DegreeCache::edge(std::span<const Vertex> e) const {
  if (e.size() != h_.k()) return false;
  Vertex buf[kMaxUniformity];
  for (Vertex v : e)
    if (v >= h_.n() || !active_[v]) return false;
  if (!sorted_window(e, buf)) return false;
  return h_.has_rank(h_.rank_of_sorted(std::span<const Vertex>(buf, e.size())));
}

// ---- predicates ----------------------------------------------------------------

bool induces_tight_path(const Hypergraph& h, std::span<const Vertex> seq, std::optional<Vertex> exempt) {
  const std::uint32_t k = h.k();
  Vertex buf[kMaxUniformity];
  for (std::size_t i = 0; i + k <= seq.size(); ++i) {
    const auto w = seq.subspan(i, k);
    if (exempt && contains(w, *exempt)) continue;
    if (!sorted_window(w, buf)) return false;
    if (!h.has_rank(h.rank_of_sorted(std::span<const Vertex>(buf, k)))) return false;
  }
  return true;
}

double good_pair_fraction(const Hypergraph& h, const GoodTupleParams& params, std::uint64_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("good_pair_fraction: need at least one sample");
  const DegreeCache dc(h, params.rho);
  const std::uint32_t k = h.k();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Vertex> pick(0, h.n() - 1);
  VertexTuple x(2 * k - 2);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (auto& v : x) v = pick(rng);
    if (!all_distinct(x)) continue;
    const VertexTuple back = reversed_tail(x, k - 1);
    if (dc.good(std::span<const Vertex>(x).first(k - 1)) && dc.good(back)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

bool absorbs(const Hypergraph& h, std::span<const Vertex> x, Vertex v, const GoodTupleParams& params) {
  for (Vertex u : x)
    if (u >= h.n()) throw std::invalid_argument("absorbs: vertex out of range");
  if (v >= h.n()) throw std::invalid_argument("absorbs: vertex out of range");
  Vertex buf[kMaxUniformity];
  return absorbs_impl(
      x, v, h.k(),
      [&](std::span<const Vertex> w) {
        return sorted_window(w, buf) && h.has_rank(h.rank_of_sorted(std::span<const Vertex>(buf, w.size())));
      },
      [&](std::span<const Vertex> t) { return is_good_tuple(h, t, params); });
}

bool absorbs(const DegreeCache& dc, std::span<const Vertex> x, Vertex v) {
  if (v >= dc.graph().n() || !dc.active(v)) return false;
  return absorbs_impl(
      x, v, dc.k(), [&](std::span<const Vertex> w) { return dc.edge(w); },
      [&](std::span<const Vertex> t) { return dc.good(t); });
}

bool connects(const Hypergraph& h, std::span<const Vertex> z, std::span<const Vertex> x, std::span<const Vertex> y) {
  const std::uint32_t k = h.k();
  if (z.size() != k - 1 || x.size() != k - 1 || y.size() != k - 1)
    throw std::invalid_argument("connects: tuples must have length k-1");
  VertexTuple all(x.begin(), x.end());
  all.insert(all.end(), y.begin(), y.end());
  all.insert(all.end(), z.begin(), z.end());
  for (Vertex v : all)
    if (v >= h.n()) throw std::invalid_argument("connects: vertex out of range");
  if (!all_distinct(all)) throw std::invalid_argument("connects: x, y, z must be disjoint with distinct entries");
  Vertex buf[kMaxUniformity];
  return connects_impl(z, x, y, k, [&](std::span<const Vertex> w) {
    return sorted_window(w, buf) && h.has_rank(h.rank_of_sorted(std::span<const Vertex>(buf, w.size())));
  });
}

// ---- absorbers -----------------------------------------------------------------

std::vector<std::uint32_t> absorber_coverage(const DegreeCache& dc, const std::vector<VertexTuple>& tuples) {
  std::vector<std::uint32_t> cov(dc.graph().n(), 0);
  for (Vertex v = 0; v < dc.graph().n(); ++v) {
    if (!dc.active(v)) continue;
    for (const auto& x : tuples)
      if (absorbs(dc, x, v)) ++cov[v];
  }
  return cov;
}

namespace {

// Drops every tuple sharing a vertex with another tuple. Returns the number removed.
std::uint64_t drop_overlapping(std::vector<VertexTuple>& tuples, std::uint32_t n) {
  std::vector<std::uint32_t> uses(n, 0);
  for (const auto& t : tuples)
    for (Vertex v : t) ++uses[v];
  const auto before = tuples.size();
  std::erase_if(tuples, [&](const VertexTuple& t) {
    return std::any_of(t.begin(), t.end(), [&](Vertex v) { return uses[v] > 1; });
  });
  return before - tuples.size();
}

VertexTuple sample_tuple(const std::vector<Vertex>& pool, std::size_t len, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  VertexTuple t(len);
  for (auto& v : t) v = pool[pick(rng)];
  return t;
}

}  // namespace

AbsorberSet build_absorbers(const DegreeCache& dc, const PipelineConfig& cfg, std::mt19937_64& rng) {
  const std::uint32_t k = dc.k();
  check_strict_constants(k, cfg);
  const auto pool = active_list(dc);
  const long double np = pool.size();
  if (pool.size() < 2 * k - 2) throw StageFailure("absorbers", "active set smaller than 2k-2");
  const long double need_cov = cfg.gamma * np / 4;
  if (!cfg.override_constants && need_cov < 1)
    throw StageFailure("absorbers", "gamma n'/4 < 1: coverage guarantee is vacuous at this size");
  const auto cap = static_cast<std::uint64_t>(std::floor(4 * cfg.gamma * np));

  AbsorberSet best;
  bool have = false;
  for (unsigned attempt = 0; attempt <= cfg.stage_retries; ++attempt) {
    AbsorberSet a;
    a.retries = attempt;
    const std::uint64_t count = draw_count(std::pow(np, 2.0L * k - 2), cfg.gamma / std::pow(np, 2.0L * k - 3), cap, rng);
    for (std::uint64_t i = 0; i < count; ++i) {
      VertexTuple x = sample_tuple(pool, 2 * k - 2, rng);
      ++a.sampled;
      bool ok = all_distinct(x);
      for (std::size_t j = 0; ok && j + k <= x.size(); ++j) ok = dc.edge(std::span<const Vertex>(x).subspan(j, k));
      ok = ok && dc.good(std::span<const Vertex>(x).first(k - 1)) && dc.good(reversed_tail(x, k - 1));
      if (!ok) {
        ++a.rejected;
        continue;
      }
      a.tuples.push_back(std::move(x));
    }
    a.removed_overlap = drop_overlapping(a.tuples, dc.graph().n());
    a.coverage = absorber_coverage(dc, a.tuples);
    std::uint64_t mc = std::numeric_limits<std::uint64_t>::max();
    for (Vertex v : pool) mc = std::min<std::uint64_t>(mc, a.coverage[v]);
    a.min_coverage = mc;
    a.bounds_met = a.tuples.size() <= 2 * cfg.gamma * np && a.min_coverage >= need_cov;
    if (!have || (a.bounds_met && !best.bounds_met) ||
        (a.bounds_met == best.bounds_met &&
         (a.min_coverage > best.min_coverage ||
          (a.min_coverage == best.min_coverage && a.tuples.size() > best.tuples.size())))) {
      best = std::move(a);
      have = true;
    }
    if (best.bounds_met) break;
  }
  best.retries = std::min(best.retries, cfg.stage_retries);
  if (best.tuples.empty()) throw StageFailure("absorbers", "no sampled tuple induces a good path");
  if (!best.bounds_met && !cfg.override_constants)
    throw StageFailure("absorbers", "coverage or size bound not met after retries");
  return best;
}

AbsorberSet build_absorbers(const Hypergraph& h, const PipelineConfig& cfg) {
  const DegreeCache dc(h, cfg.params.rho);
  std::mt19937_64 rng(cfg.seed);
  return build_absorbers(dc, cfg, rng);
}

// ---- connectors ----------------------------------------------------------------

ConnectorSet build_connectors(const DegreeCache& dc, const PipelineConfig& cfg, std::mt19937_64& rng,
                              std::span<const char> avoid) {
  const std::uint32_t k = dc.k();
  check_strict_constants(k, cfg);
  std::vector<Vertex> pool;
  for (Vertex v : active_list(dc))
    if (avoid.empty() || !avoid[v]) pool.push_back(v);
  const long double np = dc.active_count();
  if (pool.size() < 3 * (k - 1)) throw StageFailure("connectors", "too few vertices for a connector and a pair");
  const long double need_cov = cfg.beta * np / 4;
  if (!cfg.override_constants && need_cov < 1)
    throw StageFailure("connectors", "beta n'/4 < 1: coverage guarantee is vacuous at this size");
  const auto cap = static_cast<std::uint64_t>(std::floor(4 * cfg.beta * np));
  auto edge = [&](std::span<const Vertex> w) { return dc.edge(w); };

  ConnectorSet best;
  bool have = false;
  for (unsigned attempt = 0; attempt <= cfg.stage_retries; ++attempt) {
    ConnectorSet c;
    c.retries = attempt;
    for (std::size_t tries = 0; c.demand.size() < cfg.demand_pairs && tries < 100 * cfg.demand_pairs; ++tries) {
      VertexTuple xy = sample_tuple(pool, 2 * k - 2, rng);
      if (!all_distinct(xy)) continue;
      VertexTuple x(xy.begin(), xy.begin() + (k - 1)), y(xy.begin() + (k - 1), xy.end());
      if (dc.good(x) && dc.good(y)) c.demand.emplace_back(std::move(x), std::move(y));
    }
    if (c.demand.empty()) throw StageFailure("connectors", "no good pair found to serve");

    const std::uint64_t count = draw_count(std::pow(np, static_cast<long double>(k - 1)),
                                           cfg.beta / std::pow(np, static_cast<long double>(k) - 2), cap, rng);
    auto serves = [&](const VertexTuple& z, const std::pair<VertexTuple, VertexTuple>& d) {
      for (Vertex v : z)
        if (contains(d.first, v) || contains(d.second, v)) return false;
      return connects_impl(z, d.first, d.second, k, edge);
    };
    for (std::uint64_t i = 0; i < count; ++i) {
      VertexTuple z = sample_tuple(pool, k - 1, rng);
      ++c.sampled;
      const bool ok = all_distinct(z) && std::any_of(c.demand.begin(), c.demand.end(),
                                                     [&](const auto& d) { return serves(z, d); });
      if (!ok) {
        ++c.rejected;
        continue;
      }
      c.tuples.push_back(std::move(z));
    }
    c.removed_overlap = drop_overlapping(c.tuples, dc.graph().n());
    c.pair_coverage.assign(c.demand.size(), 0);
    for (std::size_t d = 0; d < c.demand.size(); ++d)
      for (const auto& z : c.tuples)
        if (serves(z, c.demand[d])) ++c.pair_coverage[d];
    c.min_coverage = *std::min_element(c.pair_coverage.begin(), c.pair_coverage.end());
    c.bounds_met = c.tuples.size() <= 2 * cfg.beta * np && c.min_coverage >= need_cov;
    if (!have || (c.bounds_met && !best.bounds_met) ||
        (c.bounds_met == best.bounds_met &&
         (c.min_coverage > best.min_coverage ||
          (c.min_coverage == best.min_coverage && c.tuples.size() > best.tuples.size())))) {
      best = std::move(c);
      have = true;
    }
    if (best.bounds_met) break;
  }
  if (!best.bounds_met && !cfg.override_constants)
    throw StageFailure("connectors", "pair coverage or size bound not met after retries");
  return best;
}

ConnectorSet build_connectors(const Hypergraph& h, const PipelineConfig& cfg) {
  const DegreeCache dc(h, cfg.params.rho);
  std::mt19937_64 rng(cfg.seed);
  return build_connectors(dc, cfg, rng);
}

// ---- paths ---------------------------------------------------------------------

VertexTuple stitch_onepath(const DegreeCache& dc, const std::vector<VertexTuple>& tuples,
                           std::span<const char> forbidden, const PipelineConfig& cfg, std::mt19937_64& rng) {
  const std::uint32_t k = dc.k(), n = dc.graph().n();
  if (tuples.empty()) return {};
  if (!cfg.override_constants) {
    if (tuples.size() > n / (4.0 * k * k)) throw StageFailure("onepath", "more than n/(4k^2) tuples");
    const auto f = forbidden.empty() ? 0 : std::count(forbidden.begin(), forbidden.end(), 1);
    if (f > n / (8.0 * k)) throw StageFailure("onepath", "forbidden set larger than n/(8k)");
  }
  std::vector<char> used(n, 0);
  for (Vertex v = 0; v < n; ++v)
    if (!forbidden.empty() && forbidden[v]) used[v] = 1;
  for (const auto& t : tuples)
    for (Vertex v : t) {
      if (used[v]) throw std::invalid_argument("stitch_onepath: tuples must be disjoint and avoid the forbidden set");
      used[v] = 1;
    }

  VertexTuple path = tuples[0];
  VertexTuple seq;
  for (std::size_t j = 1; j < tuples.size(); ++j) {
    std::vector<Vertex> avail;
    for (Vertex v = 0; v < n; ++v)
      if (dc.active(v) && !used[v]) avail.push_back(v);
    if (avail.size() < k - 1) throw StageFailure("onepath", "no fresh vertices left for a join");
    bool joined = false;
    for (unsigned attempt = 0; attempt < cfg.join_retries && !joined; ++attempt) {
      const VertexTuple z = sample_tuple(avail, k - 1, rng);
      if (!all_distinct(z)) continue;
      seq.assign(path.end() - (k - 1), path.end());
      seq.insert(seq.end(), z.begin(), z.end());
      seq.insert(seq.end(), tuples[j].begin(), tuples[j].begin() + (k - 1));
      bool ok = true;
      for (std::size_t i = 0; ok && i + k <= seq.size(); ++i) ok = dc.edge(std::span<const Vertex>(seq).subspan(i, k));
      if (!ok) continue;
      for (Vertex v : z) used[v] = 1;
      path.insert(path.end(), z.begin(), z.end());
      path.insert(path.end(), tuples[j].begin(), tuples[j].end());
      joined = true;
    }
    if (!joined) throw StageFailure("onepath", "join retry budget exhausted");
  }
  return path;
}

VertexTuple extend_path(const DegreeCache& dc, VertexTuple path, std::span<const char> forbidden) {
  const std::uint32_t k = dc.k(), n = dc.graph().n();
  if (path.size() < k - 1) throw std::invalid_argument("extend_path: path shorter than k-1");
  std::vector<char> blocked(n, 0);
  for (Vertex v = 0; v < n; ++v) blocked[v] = !dc.active(v) || (!forbidden.empty() && forbidden[v]);
  for (Vertex v : path) {
    if (blocked[v]) throw std::invalid_argument("extend_path: path meets the forbidden set");
    blocked[v] = 1;
  }
  std::vector<std::uint64_t> deg(n, 0);
  for (Vertex v = 0; v < n; ++v)
    if (dc.active(v)) deg[v] = dc.degree(std::span<const Vertex>(&v, 1));

  VertexTuple window(k), end(k - 1);
  // Grows at the back of `p`; the front is handled by reversing.
  auto grow_back = [&](VertexTuple& p) {
    for (;;) {
      Vertex pick = n;
      for (Vertex v = 0; v < n; ++v) {
        if (blocked[v] || (pick != n && deg[v] <= deg[pick])) continue;
        std::copy(p.end() - (k - 1), p.end(), window.begin());
        window[k - 1] = v;
        if (!dc.edge(window)) continue;
        end[0] = v;
        for (std::uint32_t i = 1; i < k - 1; ++i) end[i] = p[p.size() - i];
        if (!dc.good(end)) continue;
        pick = v;
      }
      if (pick == n) return;
      p.push_back(pick);
      blocked[pick] = 1;
    }
  };
  grow_back(path);
  std::reverse(path.begin(), path.end());
  grow_back(path);
  std::reverse(path.begin(), path.end());
  return path;
}

// ---- peeling -------------------------------------------------------------------

namespace {

// (k-1)-graph on the original labels: link of v over allowed vertices, minus
// edges rejected by `keep`.
template <class Keep>
Hypergraph restricted_link(const Hypergraph& h, Vertex v, const std::vector<char>& allowed, Keep&& keep) {
  const std::uint32_t k = h.k();
  Hypergraph link(h.n(), k - 1);
  std::vector<Vertex> verts;
  for (Vertex u = 0; u < h.n(); ++u)
    if (u != v && allowed[u]) verts.push_back(u);
  VertexTuple sub(k - 1), e(k);
  for_each_subset(static_cast<std::uint32_t>(verts.size()), k - 1, [&](std::span<const Vertex> idx) {
    for (std::size_t i = 0; i < idx.size(); ++i) sub[i] = verts[idx[i]];
    std::copy(sub.begin(), sub.end(), e.begin());
    e[k - 1] = v;
    if (h.has_edge(e) && keep(sub)) link.add_edge(sub);
  });
  return link;
}

}  // namespace

PeelResult peel_and_embed(const Hypergraph& h, std::uint32_t l, const PipelineConfig& cfg) {
  const std::uint32_t n = h.n(), k = h.k();
  if (k < 2 || l >= k) throw std::invalid_argument("peel_and_embed: need k >= 2 and l < k");
  const double eps = cfg.params.epsilon;
  PeelResult res;
  res.active.assign(n, 1);
  const std::vector<std::uint64_t> deg0 = all_degrees(h, 1);
  std::vector<std::uint64_t> deg = deg0;
  std::uint32_t n_act = n;

  for (;;) {
    Vertex u = n;
    for (Vertex v = 0; v < n; ++v)
      if (res.active[v] && (u == n || deg[v] < deg[u])) u = v;
    const long double need = (1.0L - eps) * static_cast<long double>(binom(n_act - 1, k - 1));
    if (meets_threshold(deg[u], need)) break;
    if (n_act <= 2 * k) throw StageFailure("peel", "peeling exhausted the graph");
    res.peeled.push_back(u);
    res.active[u] = 0;
    --n_act;
    std::vector<Vertex> rest;
    for (Vertex v = 0; v < n; ++v)
      if (res.active[v]) rest.push_back(v);
    VertexTuple e(k);
    for_each_subset(static_cast<std::uint32_t>(rest.size()), k - 1, [&](std::span<const Vertex> idx) {
      for (std::size_t i = 0; i < idx.size(); ++i) e[i] = rest[idx[i]];
      e[k - 1] = u;
      if (h.has_edge(e))
        for (std::size_t i = 0; i + 1 < k; ++i) --deg[e[i]];
    });
  }
  res.t = static_cast<std::uint32_t>(res.peeled.size());
  res.t_within_bound = res.t <= 2.0 / eps;
  if (!res.t_within_bound && !cfg.override_constants)
    throw StageFailure("peel", "t > 2/epsilon: edge-count precondition violated");
  if (res.t == 0) return res;

  const DegreeCache dc(h, res.active, cfg.params.rho);
  const long double full = static_cast<long double>(binom(n - 1, k - 1));
  for (Vertex v : res.peeled)
    res.min_peeled_degree_ratio = std::min(res.min_peeled_degree_ratio, static_cast<double>(deg0[v] / full));

  const Vertex v1 = res.peeled[0];
  if (static_cast<long double>(deg0[v1]) < (eps / 2) * full) {
    res.embed_case = 1;
    if (res.t != 1) throw StageFailure("peel", "low-degree vertex with t > 1");
    // Bad link edges: some subset misses the good-tuple degree condition in H'.
    auto good_edge = [&](std::span<const Vertex> f) {
      const std::uint32_t m = k - 1;
      Vertex sub[kMaxUniformity];
      for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        std::uint32_t len = 0;
        for (std::uint32_t j = 0; j < m; ++j)
          if (mask >> j & 1) sub[len++] = f[j];
        const long double thr = good_threshold(dc.active_count(), k, len, dc.rho());
        if (!meets_threshold(dc.degree(std::span<const Vertex>(sub, len)), thr)) return false;
      }
      return true;
    };
    const Hypergraph link = restricted_link(h, v1, res.active, good_edge);
    const TightPattern p = build_P(k, l);
    EmbeddingOptions opts;
    opts.allowed = res.active;
    opts.prune = [&](std::span<const Vertex> y) {
      if (y.size() == k - 1 && !dc.good(y)) return false;
      if (y.size() == p.t && !dc.good(reversed_tail(y, k - 1))) return false;
      return true;
    };
    const auto emb = find_embedding(link, p.t, p.edges(), opts);
    if (!emb) throw StageFailure("peel", "no good copy of P(k,l) in the link of the low-degree vertex");
    Segment seg;
    seg.order.assign(emb->begin(), emb->begin() + l);
    seg.order.push_back(v1);
    seg.order.insert(seg.order.end(), emb->begin() + l, emb->end());
    seg.exempt = v1;
    const std::uint32_t s = k - l;
    for (std::uint32_t j = 0; j < k / s; ++j) seg.designated.push_back(j * s);
    res.segments.push_back(std::move(seg));
    return res;
  }

  res.embed_case = 2;
  for (Vertex v : res.peeled)
    if (3 * static_cast<long double>(deg0[v]) < full) res.case2_degree_ok = false;
  if (!res.case2_degree_ok && !cfg.override_constants)
    throw StageFailure("peel", "peeled vertex below C(n-1,k-1)/3");
  std::vector<char> free = res.active;
  const TightPattern tp = build_pattern(PatternKind::path, k - 1, k - 2, 2 * k - 2);
  const auto tp_edges = tp.edges();
  for (Vertex v : res.peeled) {
    const Hypergraph link = restricted_link(h, v, free, [](std::span<const Vertex>) { return true; });
    EmbeddingOptions opts;
    opts.allowed = free;
    opts.prune = [&](std::span<const Vertex> y) {
      if (y.size() == k - 1 && !dc.good(y)) return false;
      if (y.size() == 2 * k - 2 && !dc.good(reversed_tail(y, k - 1))) return false;
      return true;
    };
    const auto emb = find_embedding(link, 2 * k - 2, tp_edges, opts);
    if (!emb) throw StageFailure("peel", "no good tight path through a peeled vertex");
    Segment seg;
    seg.order.assign(emb->begin(), emb->begin() + (k - 1));
    seg.order.push_back(v);
    seg.order.insert(seg.order.end(), emb->begin() + (k - 1), emb->end());
    for (Vertex u : *emb) free[u] = 0;
    res.segments.push_back(std::move(seg));
  }
  return res;
}

// ---- driver --------------------------------------------------------------------

nlohmann::json PipelineTrace::to_json() const {
  nlohmann::json j;
  j["mode"] = mode;
  j["stages"] = stages;
  j["attempts"] = attempts;
  j["attempt_failures"] = attempt_failures;
  j["outcome"] = outcome;
  if (!failure_stage.empty()) j["failure_stage"] = failure_stage;
  j["notes"] = notes;
  return j;
}

namespace {

// Kuhn augmenting-path matching; match_of[leftover] = absorber index or -1.
bool kuhn(std::size_t u, const std::vector<std::vector<std::size_t>>& adj, std::vector<int>& owner,
          std::vector<char>& seen, std::vector<int>& match_of) {
  for (std::size_t a : adj[u]) {
    if (seen[a]) continue;
    seen[a] = 1;
    if (owner[a] < 0 || kuhn(static_cast<std::size_t>(owner[a]), adj, owner, seen, match_of)) {
      owner[a] = static_cast<int>(u);
      match_of[u] = static_cast<int>(a);
      return true;
    }
  }
  return false;
}

bool mixed_cycle_ok(const Hypergraph& h, const VertexTuple& cycle, const Segment& seg, std::size_t seg_start) {
  const std::uint32_t k = h.k();
  const std::size_t n = cycle.size();
  VertexTuple w(k);
  Vertex buf[kMaxUniformity];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < k; ++j) w[j] = cycle[(i + j) % n];
    if (seg.exempt && contains(w, *seg.exempt)) {
      const std::size_t rel = (i + n - seg_start) % n;
      if (std::find(seg.designated.begin(), seg.designated.end(), rel) == seg.designated.end()) continue;
    }
    if (!sorted_window(w, buf) || !h.has_rank(h.rank_of_sorted(std::span<const Vertex>(buf, k)))) return false;
  }
  return true;
}

}  // namespace

PipelineResult run_pipeline(const Hypergraph& h, std::uint32_t l, const PipelineConfig& cfg) {
  const std::uint32_t n = h.n(), k = h.k();
  if (k < 2 || l >= k) throw std::invalid_argument("run_pipeline: need k >= 2 and l < k");
  if (n % (k - l) != 0) throw std::invalid_argument("run_pipeline: (k-l) must divide n");
  check_strict_constants(k, cfg);

  PipelineResult out;
  PipelineTrace& trace = out.trace;
  trace.mode = cfg.override_constants ? "override" : "paper";
  trace.notes.push_back("connector tail bound evaluated with beta (the stated exponent uses gamma)");
  if (cfg.override_constants) trace.notes.push_back("override constants: stage bounds recorded, not enforced");

  auto run_stage = [](std::vector<nlohmann::json>& log, const std::string& name, int step, auto&& body) {
    nlohmann::json rec{{"name", name}, {"step", step}};
    const auto t0 = std::chrono::steady_clock::now();
    auto stamp = [&] {
      rec["wall_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    };
    try {
      body(rec);
    } catch (const StageFailure& e) {
      rec["ok"] = false;
      rec["error"] = e.what();
      stamp();
      log.push_back(std::move(rec));
      throw;
    }
    rec["ok"] = true;
    stamp();
    log.push_back(std::move(rec));
  };

  std::vector<nlohmann::json> peel_log;
  PeelResult peel;
  try {
    run_stage(peel_log, "peel", 1, [&](nlohmann::json& rec) {
      peel = peel_and_embed(h, l, cfg);
      rec["t"] = peel.t;
      rec["n_active"] = std::count(peel.active.begin(), peel.active.end(), 1);
      rec["case"] = peel.embed_case;
      rec["peeled"] = peel.peeled;
      rec["t_within_bound"] = peel.t_within_bound;
      rec["case2_degree_ok"] = peel.case2_degree_ok;
      rec["min_peeled_degree_ratio"] = peel.min_peeled_degree_ratio;
      nlohmann::json segs = nlohmann::json::array();
      for (const auto& s : peel.segments) {
        nlohmann::json js{{"order", s.order}, {"designated", s.designated}};
        if (s.exempt) js["exempt"] = *s.exempt;
        segs.push_back(std::move(js));
      }
      rec["segments"] = std::move(segs);
    });
  } catch (const StageFailure& e) {
    trace.stages = std::move(peel_log);
    trace.outcome = "failed";
    trace.failure_stage = e.stage;
    return out;
  }

  const DegreeCache dc(h, peel.active, cfg.params.rho);
  const long double np = dc.active_count();
  std::vector<char> in_segments(n, 0);
  for (const auto& s : peel.segments)
    for (Vertex v : s.order) in_segments[v] = 1;

  std::mt19937_64 rng(cfg.seed);
  std::vector<nlohmann::json> log;
  for (unsigned attempt = 1; attempt <= std::max(1u, cfg.pipeline_attempts); ++attempt) {
    trace.attempts = attempt;
    log.clear();
    try {
      AbsorberSet A;
      ConnectorSet C;
      run_stage(log, "absorbers", 2, [&](nlohmann::json& rec) {
        A = build_absorbers(dc, cfg, rng);
        rec["size"] = A.tuples.size();
        rec["sampled"] = A.sampled;
        rec["rejected"] = A.rejected;
        rec["removed_overlap"] = A.removed_overlap;
        rec["retries"] = A.retries;
        rec["min_coverage"] = A.min_coverage;
        rec["coverage_target"] = static_cast<double>(cfg.gamma * np / 4);
        rec["size_bound"] = static_cast<double>(2 * cfg.gamma * np);
        rec["bounds_met"] = A.bounds_met;
      });
      run_stage(log, "connectors", 3, [&](nlohmann::json& rec) {
        C = build_connectors(dc, cfg, rng);
        rec["size"] = C.tuples.size();
        rec["sampled"] = C.sampled;
        rec["rejected"] = C.rejected;
        rec["removed_overlap"] = C.removed_overlap;
        rec["retries"] = C.retries;
        rec["demand_pairs"] = C.demand.size();
        rec["min_pair_coverage"] = C.min_coverage;
        rec["coverage_target"] = static_cast<double>(cfg.beta * np / 4);
        rec["size_bound"] = static_cast<double>(2 * cfg.beta * np);
        rec["bounds_met"] = C.bounds_met;
        rec["tail_bound_parameter"] = "beta";
      });

      std::vector<char> forbidden(n, 0);
      run_stage(log, "repair", 4, [&](nlohmann::json& rec) {
        std::vector<char> cs = in_segments;
        const auto c_before = C.tuples.size();
        std::erase_if(C.tuples, [&](const VertexTuple& z) {
          return std::any_of(z.begin(), z.end(), [&](Vertex v) { return in_segments[v] != 0; });
        });
        for (const auto& z : C.tuples)
          for (Vertex v : z) cs[v] = 1;
        const auto a_before = A.tuples.size();
        std::erase_if(A.tuples, [&](const VertexTuple& x) {
          return std::any_of(x.begin(), x.end(), [&](Vertex v) { return cs[v] != 0; });
        });
        std::vector<char> seen(n, 0);
        for (const auto* group : {&A.tuples, &C.tuples})
          for (const auto& t : *group)
            for (Vertex v : t) {
              if (seen[v] || in_segments[v]) throw std::logic_error("repair: structures still overlap");
              seen[v] = 1;
            }
        A.coverage = absorber_coverage(dc, A.tuples);
        std::uint64_t mc = std::numeric_limits<std::uint64_t>::max();
        for (Vertex v = 0; v < n; ++v)
          if (dc.active(v)) mc = std::min<std::uint64_t>(mc, A.coverage[v]);
        A.min_coverage = A.tuples.empty() ? 0 : mc;
        rec["absorbers_removed"] = a_before - A.tuples.size();
        rec["connectors_removed"] = c_before - C.tuples.size();
        rec["absorbers"] = A.tuples.size();
        rec["connectors"] = C.tuples.size();
        rec["min_coverage"] = A.min_coverage;
        rec["coverage_target"] = static_cast<double>(cfg.gamma * np / 5);
        if (!cfg.override_constants && A.min_coverage < cfg.gamma * np / 5)
          throw StageFailure("repair", "absorber coverage fell below gamma n'/5");
        forbidden = cs;
      });

      VertexTuple path;
      run_stage(log, "onepath", 5, [&](nlohmann::json& rec) {
        path = stitch_onepath(dc, A.tuples, forbidden, cfg, rng);
        rec["length"] = path.size();
        rec["tuples"] = A.tuples.size();
      });

      run_stage(log, "extend", 6, [&](nlohmann::json& rec) {
        if (path.empty()) {
          std::vector<Vertex> avail;
          for (Vertex v = 0; v < n; ++v)
            if (dc.active(v) && !forbidden[v]) avail.push_back(v);
          if (avail.size() < k - 1) throw StageFailure("extend", "no room for a seed tuple");
          for (unsigned i = 0; i < cfg.join_retries && path.empty(); ++i) {
            VertexTuple x = sample_tuple(avail, k - 1, rng);
            if (dc.good(x) && dc.good(VertexTuple(x.rbegin(), x.rend()))) path = std::move(x);
          }
          if (path.empty()) throw StageFailure("extend", "no good seed tuple found");
          rec["seeded"] = true;
        }
        const auto before = path.size();
        path = extend_path(dc, std::move(path), forbidden);
        std::uint64_t uncovered = 0;
        std::vector<char> on(n, 0);
        for (Vertex v : path) on[v] = 1;
        for (Vertex v = 0; v < n; ++v)
          if (dc.active(v) && !forbidden[v] && !on[v]) ++uncovered;
        rec["length_before"] = before;
        rec["length"] = path.size();
        rec["uncovered_outside_forbidden"] = uncovered;
        rec["k_rho_n"] = k * cfg.params.rho * static_cast<double>(np);
        rec["within_k_rho_n"] = uncovered <= k * cfg.params.rho * np;
      });

      VertexTuple cycle;
      std::size_t seg1_start = 0;
      run_stage(log, "close", 7, [&](nlohmann::json& rec) {
        std::vector<const VertexTuple*> pieces{&path};
        for (const auto& s : peel.segments) pieces.push_back(&s.order);
        std::vector<char> used(C.tuples.size(), 0);
        const std::optional<Vertex> exempt = peel.embed_case == 1 ? peel.segments[0].exempt : std::nullopt;
        VertexTuple local;
        std::vector<std::size_t> chosen;
        for (std::size_t j = 0; j < pieces.size(); ++j) {
          const VertexTuple& left = *pieces[j];
          const VertexTuple& right = *pieces[(j + 1) % pieces.size()];
          std::size_t pick = C.tuples.size();
          for (std::size_t c = 0; c < C.tuples.size() && pick == C.tuples.size(); ++c) {
            if (used[c]) continue;
            local.assign(left.end() - (k - 1), left.end());
            local.insert(local.end(), C.tuples[c].begin(), C.tuples[c].end());
            local.insert(local.end(), right.begin(), right.begin() + (k - 1));
            if (induces_tight_path(h, local, exempt)) pick = c;
          }
          if (pick == C.tuples.size()) throw StageFailure("close", "no unused connector joins two pieces");
          used[pick] = 1;
          chosen.push_back(pick);
        }
        for (std::size_t j = 0; j < pieces.size(); ++j) {
          if (j == 1) seg1_start = cycle.size();
          cycle.insert(cycle.end(), pieces[j]->begin(), pieces[j]->end());
          cycle.insert(cycle.end(), C.tuples[chosen[j]].begin(), C.tuples[chosen[j]].end());
        }
        rec["junctions"] = pieces.size();
        rec["connectors_used"] = chosen;
        rec["connectors_unused"] = C.tuples.size() - chosen.size();
        rec["length"] = cycle.size();
      });

      run_stage(log, "absorb", 8, [&](nlohmann::json& rec) {
        std::vector<char> on(n, 0);
        for (Vertex v : cycle) on[v] = 1;
        std::vector<Vertex> left;
        for (Vertex v = 0; v < n; ++v)
          if (!on[v]) {
            if (!dc.active(v)) throw std::logic_error("absorb: peeled vertex missing from the cycle");
            left.push_back(v);
          }
        std::vector<std::vector<std::size_t>> adj(left.size());
        std::uint64_t min_cov = std::numeric_limits<std::uint64_t>::max();
        for (std::size_t i = 0; i < left.size(); ++i) {
          for (std::size_t a = 0; a < A.tuples.size(); ++a)
            if (absorbs(dc, A.tuples[a], left[i])) adj[i].push_back(a);
          min_cov = std::min<std::uint64_t>(min_cov, adj[i].size());
        }
        rec["leftovers"] = left.size();
        rec["min_coverage_over_leftovers"] = left.empty() ? 0 : min_cov;
        if (!left.empty() && left.size() > min_cov)
          throw StageFailure("absorb", "more leftovers than the minimum absorber coverage");

        std::vector<int> owner(A.tuples.size(), -1), match_of(left.size(), -1);
        bool greedy = true;
        for (std::size_t i = 0; i < left.size() && greedy; ++i) {
          const auto it = std::find_if(adj[i].begin(), adj[i].end(), [&](std::size_t a) { return owner[a] < 0; });
          if (it == adj[i].end()) greedy = false;
          else {
            owner[*it] = static_cast<int>(i);
            match_of[i] = static_cast<int>(*it);
          }
        }
        if (!greedy) {
          std::fill(owner.begin(), owner.end(), -1);
          std::fill(match_of.begin(), match_of.end(), -1);
          for (std::size_t i = 0; i < left.size(); ++i) {
            std::vector<char> seen(A.tuples.size(), 0);
            if (!kuhn(i, adj, owner, seen, match_of)) throw StageFailure("absorb", "no matching of leftovers to absorbers");
          }
        }
        rec["matching"] = greedy ? "greedy" : "augmenting";

        std::vector<std::size_t> pos(n, 0);
        for (std::size_t i = 0; i < cycle.size(); ++i) pos[cycle[i]] = i;
        std::vector<std::pair<std::size_t, Vertex>> inserts;
        for (std::size_t i = 0; i < left.size(); ++i)
          inserts.emplace_back(pos[A.tuples[match_of[i]][k - 2]], left[i]);
        std::sort(inserts.rbegin(), inserts.rend());
        for (const auto& [p, v] : inserts) {
          cycle.insert(cycle.begin() + static_cast<std::ptrdiff_t>(p + 1), v);
          if (peel.embed_case == 1 && p < seg1_start) ++seg1_start;
        }
        rec["absorbed"] = left.size();
        rec["length"] = cycle.size();
      });

      // Validation against the plain window definitions.
      const auto tv = std::chrono::steady_clock::now();
      if (cycle.size() != n) throw StageFailure("validate", "cycle does not span the vertex set");
      VertexTuple result;
      if (peel.embed_case == 1) {
        if (!mixed_cycle_ok(h, cycle, peel.segments[0], seg1_start))
          throw StageFailure("validate", "mixed cycle window check failed");
        result.assign(cycle.begin() + static_cast<std::ptrdiff_t>(seg1_start), cycle.end());
        result.insert(result.end(), cycle.begin(), cycle.begin() + static_cast<std::ptrdiff_t>(seg1_start));
      } else {
        if (!is_l_tight_ham_cycle(h, cycle, k - 1)) throw StageFailure("validate", "tight cycle window check failed");
        result = cycle;
      }
      if (!is_l_tight_ham_cycle(h, result, l)) throw StageFailure("validate", "l-tight window check failed");
      log.push_back({{"name", "validate"},
                     {"step", 8},
                     {"ok", true},
                     {"tight", peel.embed_case != 1},
                     {"wall_ms", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - tv).count()}});

      trace.stages = std::move(peel_log);
      trace.stages.insert(trace.stages.end(), log.begin(), log.end());
      trace.outcome = "cycle";
      trace.failure_stage.clear();
      out.cycle = std::move(result);
      return out;
    } catch (const StageFailure& e) {
      trace.attempt_failures.push_back(e.what());
      trace.failure_stage = e.stage;
    }
  }
  trace.stages = std::move(peel_log);
  trace.stages.insert(trace.stages.end(), log.begin(), log.end());
  trace.outcome = "failed";
  return out;
}

}  // namespace tighthyp
