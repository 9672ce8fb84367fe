#include "tighthyp/extremal.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "tighthyp/solver.hpp"

namespace tighthyp {

namespace {

using Mask = std::vector<std::uint64_t>;

class HittingSetSearch {
public:
  HittingSetSearch(std::uint64_t edge_count, const std::vector<std::vector<std::uint64_t>>& copies,
                   std::uint64_t node_budget)
      : edges_(edge_count), words_((edge_count + 63) / 64), count_(copies.size()), budget_(node_budget) {
    masks_.assign(count_ * words_, 0);
    for (std::size_t c = 0; c < count_; ++c)
      for (std::uint64_t r : copies[c]) masks_[c * words_ + r / 64] |= std::uint64_t{1} << (r % 64);
  }

  void run() {
    Mask removed(words_, 0), kept(words_, 0);
    greedy_upper_bound();
    root_lb_ = packing_bound(removed, kept);
    if (root_lb_ < best_size_) search(removed, kept, 0);
  }

  std::uint64_t best_size() const { return best_size_; }
  const Mask& best() const { return best_; }
  std::uint64_t root_lower_bound() const { return root_lb_; }
  std::uint64_t greedy_size() const { return greedy_size_; }
  std::uint64_t nodes() const { return nodes_; }

private:
  const std::uint64_t* copy(std::size_t c) const { return masks_.data() + c * words_; }

  bool hit(std::size_t c, const Mask& removed) const {
    const auto* m = copy(c);
    for (std::size_t w = 0; w < words_; ++w)
      if (m[w] & removed[w]) return true;
    return false;
  }

  int free_count(std::size_t c, const Mask& kept) const {
    const auto* m = copy(c);
    int cnt = 0;
    for (std::size_t w = 0; w < words_; ++w) cnt += std::popcount(m[w] & ~kept[w]);
    return cnt;
  }

  void greedy_upper_bound() {
    Mask removed(words_, 0);
    std::vector<std::uint64_t> freq(edges_);
    std::uint64_t size = 0;
    for (;;) {
      std::fill(freq.begin(), freq.end(), 0);
      bool any = false;
      for (std::size_t c = 0; c < count_; ++c) {
        if (hit(c, removed)) continue;
        any = true;
        const auto* m = copy(c);
        for (std::size_t w = 0; w < words_; ++w)
          for (std::uint64_t b = m[w]; b; b &= b - 1) ++freq[w * 64 + std::countr_zero(b)];
      }
      if (!any) break;
      const auto e = static_cast<std::size_t>(std::max_element(freq.begin(), freq.end()) - freq.begin());
      removed[e / 64] |= std::uint64_t{1} << (e % 64);
      ++size;
    }
    best_ = removed;
    best_size_ = greedy_size_ = size;
  }

  // Greedy packing of unhit copies whose free edges are pairwise disjoint.
  std::uint64_t packing_bound(const Mask& removed, const Mask& kept) const {
    std::vector<std::pair<int, std::size_t>> open;
    for (std::size_t c = 0; c < count_; ++c)
      if (!hit(c, removed)) open.emplace_back(free_count(c, kept), c);
    std::sort(open.begin(), open.end());
    Mask used(words_, 0);
    std::uint64_t packed = 0;
    for (const auto& [cnt, c] : open) {
      const auto* m = copy(c);
      bool disjoint = true;
      for (std::size_t w = 0; w < words_ && disjoint; ++w)
        if (m[w] & ~kept[w] & used[w]) disjoint = false;
      if (!disjoint) continue;
      for (std::size_t w = 0; w < words_; ++w) used[w] |= m[w] & ~kept[w];
      ++packed;
    }
    return packed;
  }

  void search(Mask removed, const Mask& kept_in, std::uint64_t size) {
    ++nodes_;
    if (budget_ != 0 && nodes_ > budget_) throw BudgetExhausted("exact_ex: node budget exhausted");
    Mask kept = kept_in;

    // Unit propagation: a copy with one free edge forces that edge.
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t c = 0; c < count_; ++c) {
        if (hit(c, removed)) continue;
        const auto* m = copy(c);
        int cnt = 0;
        std::size_t last = 0;
        for (std::size_t w = 0; w < words_; ++w) {
          const std::uint64_t f = m[w] & ~kept[w];
          if (f) last = w * 64 + 63 - std::countl_zero(f);
          cnt += std::popcount(f);
        }
        if (cnt == 0) return;
        if (cnt == 1) {
          removed[last / 64] |= std::uint64_t{1} << (last % 64);
          ++size;
          changed = true;
        }
      }
      if (size >= best_size_) return;
    }

    std::size_t branch = count_;
    int branch_cnt = 0;
    for (std::size_t c = 0; c < count_; ++c) {
      if (hit(c, removed)) continue;
      const int cnt = free_count(c, kept);
      if (branch == count_ || cnt < branch_cnt) {
        branch = c;
        branch_cnt = cnt;
      }
    }
    if (branch == count_) {
      best_size_ = size;
      best_ = removed;
      return;
    }

    const std::uint64_t lb = (nodes_ - 1) % kPackingBoundInterval == 0 ? packing_bound(removed, kept) : 1;
    if (size + lb >= best_size_) return;

    std::vector<std::pair<std::uint64_t, std::size_t>> order;
    const auto* bm = copy(branch);
    for (std::size_t w = 0; w < words_; ++w)
      for (std::uint64_t b = bm[w] & ~kept[w]; b; b &= b - 1) order.emplace_back(0, w * 64 + std::countr_zero(b));
    for (std::size_t c = 0; c < count_; ++c) {
      if (hit(c, removed)) continue;
      const auto* m = copy(c);
      for (auto& [f, e] : order)
        if (m[e / 64] >> (e % 64) & 1) ++f;
    }
    std::sort(order.begin(), order.end());

    for (const auto& [f, e] : order) {
      Mask child = removed;
      child[e / 64] |= std::uint64_t{1} << (e % 64);
      search(std::move(child), kept, size + 1);
      kept[e / 64] |= std::uint64_t{1} << (e % 64);
      if (size + 1 >= best_size_) return;
    }
  }

  std::uint64_t edges_;
  std::size_t words_, count_;
  std::uint64_t budget_;
  Mask masks_;
  Mask best_;
  std::uint64_t best_size_ = 0, greedy_size_ = 0, root_lb_ = 0, nodes_ = 0;
};

std::string cache_key(std::uint32_t n, const TightPattern& p) {
  std::ostringstream os;
  os << "n=" << n << " k=" << p.k << ' ' << p.describe();
  return os.str();
}

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

nlohmann::json load_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in) return nlohmann::json::object();
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception&) {
    throw std::runtime_error("extremal cache '" + path + "' is not valid JSON");
  }
  if (!j.is_object()) throw std::runtime_error("extremal cache '" + path + "' must hold a JSON object");
  return j;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<ExtremalResult> cache_lookup(const std::string& path, std::uint32_t n, const TightPattern& p) {
  std::lock_guard lock(cache_mutex());
  const auto j = load_cache(path);
  const auto it = j.find(cache_key(n, p));
  if (it == j.end()) return std::nullopt;
  ExtremalResult r;
  r.n = n;
  r.k = p.k;
  r.pattern = p.describe();
  r.value = it->at("value").get<std::uint64_t>();
  r.witness = Hypergraph(n, p.k);
  for (const auto& e : it->at("witness")) r.witness.add_edge(e.get<std::vector<Vertex>>());
  if (r.witness.edge_count() != r.value) throw std::runtime_error("extremal cache entry has inconsistent witness");
  const auto& c = it->at("certificate");
  r.certificate.copies = c.value("copies", std::uint64_t{0});
  r.certificate.hitting_set_size = c.value("hitting_set_size", std::uint64_t{0});
  r.certificate.root_lower_bound = c.value("root_lower_bound", std::uint64_t{0});
  r.certificate.greedy_upper_bound = c.value("greedy_upper_bound", std::uint64_t{0});
  r.certificate.nodes = c.value("nodes", std::uint64_t{0});
  r.hitting_set = complement(r.witness).edges();
  r.from_cache = true;
  return r;
}

void cache_store(const std::string& path, const ExtremalResult& r, const TightPattern& p) {
  std::lock_guard lock(cache_mutex());
  auto j = load_cache(path);
  nlohmann::json entry;
  entry["value"] = r.value;
  entry["witness"] = r.witness.edges();
  entry["timestamp"] = utc_timestamp();
  entry["certificate"] = {{"copies", r.certificate.copies},
                          {"hitting_set_size", r.certificate.hitting_set_size},
                          {"root_lower_bound", r.certificate.root_lower_bound},
                          {"greedy_upper_bound", r.certificate.greedy_upper_bound},
                          {"nodes", r.certificate.nodes}};
  j[cache_key(r.n, p)] = std::move(entry);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write extremal cache '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace

ExtremalResult exact_ex(std::uint32_t n, const TightPattern& p, const ExtremalOptions& opts) {
  if (p.edge_count() == 0) throw std::invalid_argument("exact_ex: pattern has no edges");
  if (p.k > n) throw std::invalid_argument("exact_ex: uniformity exceeds vertex count");
  if (!opts.cache_path.empty())
    if (auto hit = cache_lookup(opts.cache_path, n, p)) return *hit;

  const auto copies = enumerate_copies(n, p, opts.max_copies * 64);
  if (copies.size() > opts.max_copies) throw std::length_error("exact_ex: copy count exceeds memory cap");
  const std::uint64_t total = binom(n, p.k);

  HittingSetSearch search(total, copies, opts.node_budget);
  search.run();

  ExtremalResult r;
  r.n = n;
  r.k = p.k;
  r.pattern = p.describe();
  r.value = total - search.best_size();
  r.certificate = {copies.size(), search.best_size(), search.root_lower_bound(), search.greedy_size(), search.nodes()};
  r.witness = Hypergraph(n, p.k);
  Hypergraph removed(n, p.k);
  for (std::uint64_t rank = 0; rank < total; ++rank) {
    if (search.best()[rank / 64] >> (rank % 64) & 1) removed.add_rank(rank);
    else r.witness.add_rank(rank);
  }
  r.hitting_set = removed.edges();
  if (r.witness.edge_count() != r.value || search.root_lower_bound() > search.best_size())
    throw std::logic_error("exact_ex: inconsistent certificate");
  if (contains_pattern(r.witness, p)) throw std::logic_error("exact_ex: witness contains the pattern");

  if (!opts.cache_path.empty()) cache_store(opts.cache_path, r, p);
  return r;
}

std::uint64_t theorem1_rhs(std::uint32_t n, std::uint32_t k, std::uint32_t l, const ExtremalOptions& opts) {
  if (k < 2 || l >= k) throw std::invalid_argument("theorem1_rhs: need k >= 2 and l < k");
  if (n == 0 || n % (k - l) != 0) throw std::invalid_argument("theorem1_rhs: (k-l) must divide n");
  if (n < k + 1) throw std::invalid_argument("theorem1_rhs: n must exceed k");
  const TightPattern p = build_P(k, l);
  return binom(n - 1, k) + exact_ex(n - 1, p, opts).value;
}

std::vector<NamedBound> known_bounds(std::uint32_t n, std::uint32_t k, std::uint32_t l, std::optional<double> p) {
  std::vector<NamedBound> out;
  if (k < 2 || l >= k || n < k + 1) return out;
  const double base = static_cast<double>(binom(n - 1, k));
  const double c_k2 = static_cast<double>(binom(n - 1, k - 2));
  const bool tight = l == k - 1;
  if (tight && n >= 2 * k - 1) out.push_back({"kk-general", true, base + static_cast<double>(binom(n - 2, k - 2))});
  if (tight && k == 3 && n % 3 == 1 && n >= 7) out.push_back({"kk-k3", true, base + (n - 1)});
  if (tight) {
    // Steiner systems S(k-2, 2k-3, n-1) with settled existence: k=3 (3 | m), k=4 (m = 1, 5 mod 20).
    const std::uint32_t m = n - 1;
    const bool steiner = (k == 3 && m % 3 == 0) || (k == 4 && (m % 20 == 1 || m % 20 == 5));
    if (steiner) out.push_back({"tuza-steiner", true, base + c_k2});
    if (p) {
      if (!(*p >= 0.0 && *p <= 1.0)) throw std::invalid_argument("known_bounds: block fraction must lie in [0, 1]");
      out.push_back({"tuza-partial", true, base + *p * c_k2});
    }
    out.push_back({"gkl-lower-leading", true, base + c_k2});
  }
  out.push_back({"gkl-upper", false, base + (k - 1) * c_k2});
  return out;
}

ThresholdResult exact_h(std::uint32_t n, std::uint32_t k, std::uint32_t l, std::uint32_t d, const ExtremalOptions& opts) {
  if (k < 2 || l >= k || d >= k) throw std::invalid_argument("exact_h: need k >= 2, l < k, d < k");
  if (n < k + 1 || n % (k - l) != 0) throw std::invalid_argument("exact_h: need n > k and (k-l) | n");
  const std::uint64_t m = binom(n, k);
  if (m > kExactHMaxKSets) throw std::invalid_argument("exact_h: instance too large for an exhaustive sweep");

  // d-set -> mask of the k-sets containing it.
  std::vector<std::uint32_t> dmasks;
  if (d > 0) {
    const Hypergraph full = complete(n, k);
    for_each_subset(n, d, [&](std::span<const Vertex> s) {
      std::uint32_t mask = 0;
      for (std::uint64_t r = 0; r < m; ++r) {
        VertexTuple e(k);
        colex_unrank(r, k, full.binomials(), e);
        if (std::includes(e.begin(), e.end(), s.begin(), s.end())) mask |= std::uint32_t{1} << r;
      }
      dmasks.push_back(mask);
    });
  }
  const std::uint64_t graphs = std::uint64_t{1} << m;
  std::vector<std::uint8_t> delta(graphs);
  std::uint32_t top = 0;
  for (std::uint64_t g = 0; g < graphs; ++g) {
    std::uint32_t v;
    if (d == 0) {
      v = static_cast<std::uint32_t>(std::popcount(g));
    } else {
      v = 64;
      for (std::uint32_t dm : dmasks) v = std::min<std::uint32_t>(v, std::popcount(static_cast<std::uint32_t>(g) & dm));
    }
    delta[g] = static_cast<std::uint8_t>(v);
    top = std::max(top, v);
  }

  ThresholdResult res;
  res.n = n, res.k = k, res.l = l, res.d = d;
  SearchConfig cfg;
  cfg.node_budget = opts.node_budget;
  for (std::int64_t level = top; level >= 0; --level) {
    for (std::uint64_t g = 0; g < graphs; ++g) {
      if (delta[g] != level) continue;
      ++res.graphs_checked;
      Hypergraph h(n, k);
      for (std::uint64_t r = 0; r < m; ++r)
        if (g >> r & 1) h.add_rank(r);
      ++res.solver_calls;
      const auto out = find_hamcycle(h, l, cfg);
      if (out.outcome == SearchOutcome::budget_exhausted) throw BudgetExhausted("exact_h: solver budget exhausted");
      if (out.outcome == SearchOutcome::refuted) {
        res.value = static_cast<std::uint64_t>(level) + 1;
        res.witness = std::move(h);
        if (d == 0 && n > k) {
          const auto ex = exact_ex(n, build_pattern(PatternKind::cycle, k, l, n), opts);
          if (ex.value + 1 != res.value) throw std::logic_error("exact_h: sweep disagrees with exact_ex + 1");
        }
        return res;
      }
    }
  }
  throw std::logic_error("exact_h: empty graph reported Hamiltonian");
}

}  // namespace tighthyp
