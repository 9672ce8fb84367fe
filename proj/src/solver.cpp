#include "tighthyp/solver.hpp"

#include <atomic>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace tighthyp {

const char* to_string(SearchOutcome o) {
  switch (o) {
    case SearchOutcome::found: return "found";
    case SearchOutcome::refuted: return "refuted";
    case SearchOutcome::budget_exhausted: return "budget-exhausted";
  }
  return "?";
}

namespace {

// Window layout for one phase: windows start at positions phase + i*s (mod n).
struct PhaseLayout {
  std::uint32_t phase = 0;
  bool reflect_constraint = false;  // require ord[1] < ord[n-1]
  // check_at[p]: windows (as position lists) whose last-filled position is p.
  std::vector<std::vector<std::vector<std::uint32_t>>> check_at;
};

PhaseLayout make_layout(std::uint32_t n, std::uint32_t k, std::uint32_t s, std::uint32_t phase) {
  PhaseLayout layout;
  layout.phase = phase;
  layout.check_at.resize(n);
  for (std::uint32_t i = 0; i < n / s; ++i) {
    std::vector<std::uint32_t> pos(k);
    std::uint32_t last = 0;
    for (std::uint32_t j = 0; j < k; ++j) {
      pos[j] = static_cast<std::uint32_t>((static_cast<std::uint64_t>(phase) + i * s + j) % n);
      last = std::max(last, pos[j]);
    }
    layout.check_at[last].push_back(std::move(pos));
  }
  return layout;
}

struct Task {
  std::size_t layout;
  Vertex first;  // vertex at the first free position
};

class HamSearch {
public:
  HamSearch(const Hypergraph& h, std::uint32_t l, const SearchConfig& cfg) : h_(h), cfg_(cfg), n_(h.n()), k_(h.k()) {
    s_ = k_ - l;
    anchored_ = cfg.symmetry_reduction;

    // Static fail-first order: ascending degree, ties by index.
    std::vector<std::uint64_t> deg(n_, 0);
    if (k_ >= 2) deg = all_degrees(h, 1);
    else h.for_each_edge([&](std::span<const Vertex> e) { ++deg[e[0]]; });
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](Vertex a, Vertex b) { return deg[a] < deg[b]; });

    if (anchored_) {
      for (std::uint32_t phase = 0; phase < s_; ++phase) {
        // Reflection p -> -p fixes position 0 and maps this phase onto `mirror`.
        const std::uint32_t mirror =
            static_cast<std::uint32_t>(((static_cast<std::int64_t>(s_) * (k_ + 1) - phase - (k_ - 1)) % s_ + s_) % s_);
        if (mirror < phase) continue;
        PhaseLayout layout = make_layout(n_, k_, s_, phase);
        layout.reflect_constraint = (mirror == phase) && n_ >= 3;
        layouts_.push_back(std::move(layout));
      }
    } else {
      layouts_.push_back(make_layout(n_, k_, s_, 0));
    }
  }

  HamSearchResult run() {
    HamSearchResult result;
    const std::uint32_t first_pos = anchored_ ? 1 : 0;
    std::vector<Task> tasks;
    for (std::size_t li = 0; li < layouts_.size(); ++li)
      for (Vertex v : order_)
        if (!(anchored_ && v == 0)) tasks.push_back({li, v});
    if (n_ == 1 && anchored_) {
      // Only the anchor; a single window of size k > 1 cannot exist.
      tasks.clear();
    }
    (void)first_pos;

    best_task_.store(std::numeric_limits<std::size_t>::max());
    const unsigned workers = std::max(1u, std::min<unsigned>(cfg_.threads, static_cast<unsigned>(tasks.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      Worker w(*this);
      for (;;) {
        const std::size_t ti = next.fetch_add(1);
        if (ti >= tasks.size() || stop_.load()) break;
        if (ti > best_task_.load()) break;
        if (w.run(tasks[ti], ti)) {
          std::lock_guard lock(mutex_);
          if (ti < best_task_.load()) {
            best_task_.store(ti);
            witness_ = w.rotated();
          }
          if (!cfg_.determinism) stop_.store(true);
        }
      }
    };
    if (workers == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }

    result.nodes = nodes_.load();
    if (witness_) {
      if (!is_l_tight_ham_cycle(h_, *witness_, k_ - s_))
        throw std::logic_error("find_hamcycle: produced ordering failed validation");
      result.outcome = SearchOutcome::found;
      result.ordering = std::move(witness_);
    } else if (exhausted_.load()) {
      result.outcome = SearchOutcome::budget_exhausted;
    } else {
      result.outcome = SearchOutcome::refuted;
    }
    return result;
  }

private:
  class Worker {
  public:
    explicit Worker(HamSearch& s) : s_(s), ord_(s.n_), used_(s.n_, 0) {}

    bool run(const Task& task, std::size_t task_index) {
      layout_ = &s_.layouts_[task.layout];
      task_index_ = task_index;
      std::fill(used_.begin(), used_.end(), 0);
      std::uint32_t pos = 0;
      if (s_.anchored_) {
        ord_[0] = 0;
        used_[0] = 1;
        pos = 1;
      }
      if (!assign(pos, task.first)) return false;
      return dfs(pos + 1);
    }

    VertexTuple rotated() const {
      VertexTuple out(s_.n_);
      for (std::uint32_t j = 0; j < s_.n_; ++j) out[j] = ord_[(j + layout_->phase) % s_.n_];
      return out;
    }

  private:
    bool cancelled() const {
      return s_.stop_.load(std::memory_order_relaxed) || s_.exhausted_.load(std::memory_order_relaxed) ||
             task_index_ > s_.best_task_.load(std::memory_order_relaxed);
    }

    // Places v at pos if every window completing there is an edge.
    bool assign(std::uint32_t pos, Vertex v) {
      const std::uint64_t count = s_.nodes_.fetch_add(1, std::memory_order_relaxed) + 1;
      if (s_.cfg_.node_budget != 0 && count > s_.cfg_.node_budget) {
        s_.exhausted_.store(true);
        return false;
      }
      ord_[pos] = v;
      if (pos == s_.n_ - 1 && layout_->reflect_constraint && !(ord_[1] < ord_[s_.n_ - 1])) return false;
      Vertex buf[kMaxUniformity];
      for (const auto& win : layout_->check_at[pos]) {
        for (std::size_t j = 0; j < win.size(); ++j) buf[j] = ord_[win[j]];
        std::sort(buf, buf + win.size());
        if (!s_.h_.has_rank(s_.h_.rank_of_sorted(std::span<const Vertex>(buf, win.size())))) return false;
      }
      used_[v] = 1;
      return true;
    }

    bool dfs(std::uint32_t pos) {
      if (pos == s_.n_) return true;
      if (cancelled()) return false;
      for (Vertex v : s_.order_) {
        if (used_[v]) continue;
        if (!assign(pos, v)) {
          if (s_.exhausted_.load(std::memory_order_relaxed)) return false;
          continue;
        }
        if (dfs(pos + 1)) return true;
        used_[v] = 0;
        if (cancelled()) return false;
      }
      return false;
    }

    HamSearch& s_;
    const PhaseLayout* layout_ = nullptr;
    std::size_t task_index_ = 0;
    VertexTuple ord_;
    std::vector<char> used_;
  };

  const Hypergraph& h_;
  const SearchConfig& cfg_;
  std::uint32_t n_, k_, s_ = 1;
  bool anchored_ = true;
  std::vector<Vertex> order_;
  std::vector<PhaseLayout> layouts_;

  std::atomic<std::uint64_t> nodes_{0};
  std::atomic<bool> exhausted_{false};
  std::atomic<bool> stop_{false};
  std::atomic<std::size_t> best_task_{0};
  std::mutex mutex_;
  std::optional<VertexTuple> witness_;
};

}  // namespace

HamSearchResult find_hamcycle(const Hypergraph& h, std::uint32_t l, const SearchConfig& cfg) {
  const std::uint32_t n = h.n(), k = h.k();
  if (l >= k) throw std::invalid_argument("find_hamcycle: l must be smaller than k");
  if (n == 0 || n % (k - l) != 0) throw std::invalid_argument("find_hamcycle: (k-l) must divide n");
  if (n < k) return HamSearchResult{SearchOutcome::refuted, std::nullopt, 0};
  return HamSearch(h, l, cfg).run();
}

std::vector<std::vector<std::uint64_t>> enumerate_copies(std::uint32_t n, const TightPattern& p, std::uint64_t max_maps) {
  if (p.t > n) return {};
  std::uint64_t maps = 1;
  for (std::uint32_t i = 0; i < p.t; ++i) {
    maps *= (n - i);
    if (maps > max_maps) throw std::length_error("enumerate_copies: too many embeddings to enumerate");
  }
  const BinomialTable table(n, p.k);
  const auto edges = p.edges();
  std::vector<std::vector<std::uint64_t>> copies;
  copies.reserve(maps);

  // Injective maps pattern vertex -> host vertex, lexicographic.
  std::vector<Vertex> map(p.t);
  std::vector<char> used(n, 0);
  std::vector<std::uint64_t> cur(edges.size());
  Vertex buf[kMaxUniformity];
  auto emit = [&] {
    for (std::size_t i = 0; i < edges.size(); ++i) {
      for (std::size_t j = 0; j < edges[i].size(); ++j) buf[j] = map[edges[i][j]];
      std::sort(buf, buf + edges[i].size());
      cur[i] = colex_rank(std::span<const Vertex>(buf, edges[i].size()), table);
    }
    auto copy = cur;
    std::sort(copy.begin(), copy.end());
    copy.erase(std::unique(copy.begin(), copy.end()), copy.end());
    copies.push_back(std::move(copy));
  };
  std::function<void(std::uint32_t)> rec = [&](std::uint32_t pos) {
    if (pos == p.t) {
      emit();
      return;
    }
    for (Vertex v = 0; v < n; ++v) {
      if (used[v]) continue;
      used[v] = 1;
      map[pos] = v;
      rec(pos + 1);
      used[v] = 0;
    }
  };
  rec(0);
  std::sort(copies.begin(), copies.end());
  copies.erase(std::unique(copies.begin(), copies.end()), copies.end());
  return copies;
}

std::uint64_t count_extensions(const Hypergraph& h, std::span<const Vertex> partial, std::uint32_t l) {
  const std::uint32_t n = h.n(), k = h.k();
  if (l >= k) throw std::invalid_argument("count_extensions: l must be smaller than k");
  std::vector<char> used(n, 0);
  for (Vertex v : partial) {
    if (v >= n || used[v]) throw std::invalid_argument("count_extensions: partial ordering must be distinct vertices");
    used[v] = 1;
  }
  const std::uint32_t s = k - l;
  const std::uint64_t pos = partial.size();
  const bool window_ends_here = pos + 1 >= k && (pos + 1 - k) % s == 0;
  std::uint64_t count = 0;
  Vertex buf[kMaxUniformity];
  for (Vertex v = 0; v < n; ++v) {
    if (used[v]) continue;
    if (window_ends_here) {
      const std::size_t start = pos + 1 - k;
      for (std::uint32_t j = 0; j + 1 < k; ++j) buf[j] = partial[start + j];
      buf[k - 1] = v;
      std::sort(buf, buf + k);
      if (!h.has_rank(h.rank_of_sorted(std::span<const Vertex>(buf, k)))) continue;
    }
    ++count;
  }
  return count;
}

}  // namespace tighthyp
