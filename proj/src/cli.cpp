#include "tighthyp/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tighthyp/absorb.hpp"
#include "tighthyp/constructions.hpp"
#include "tighthyp/extremal.hpp"
#include "tighthyp/solver.hpp"

namespace tighthyp::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// command, parameters, seed, outcome, wall time, artifact paths.
json run_record(const std::string& command, json params, std::optional<std::uint64_t> seed, const std::string& outcome,
                double wall_ms, std::vector<std::string> artifacts) {
  json r;
  r["command"] = command;
  r["parameters"] = std::move(params);
  r["seed"] = seed ? json(*seed) : json(nullptr);
  r["outcome"] = outcome;
  r["wall_ms"] = wall_ms;
  r["artifacts"] = std::move(artifacts);
  return r;
}

Hypergraph load_graph(const std::string& path) {
  if (path == "-") return read_text(std::cin);
  return load_text(path);
}

void emit_graph(const Hypergraph& h, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") write_text(out, h);
  else save_text(path, h);
}

PatternKind parse_kind(const std::string& s) {
  if (s == "path") return PatternKind::path;
  if (s == "cycle") return PatternKind::cycle;
  throw UsageError("pattern kind must be 'path' or 'cycle'");
}

std::string join(const VertexTuple& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.size(); ++i) os << (i ? " " : "") << t[i];
  return os.str();
}

// ---- gen ----------------------------------------------------------------------

struct GenOpts {
  std::string family;
  std::uint32_t n = 0, k = 3;
  double p = 0.5;
  std::optional<std::uint64_t> seed;
  std::string link, out;
  bool json_out = false;
};

int cmd_gen(const GenOpts& o, std::ostream& out) {
  const auto t0 = Clock::now();
  if (o.json_out && (o.out.empty() || o.out == "-")) throw UsageError("gen --json needs --out");
  Hypergraph h(1, 1);
  json params{{"family", o.family}, {"n", o.n}, {"k", o.k}};
  if (o.family == "ore") {
    h = ore_graph(o.n);
  } else if (o.family == "kk") {
    h = kk_lower(o.n, o.k);
  } else if (o.family == "tuza") {
    if (!o.seed) throw UsageError("gen --family tuza needs --seed");
    if (o.k < 3 || o.n < 2) throw UsageError("tuza needs k >= 3");
    const auto d = greedy_partial_steiner(o.n - 1, o.k - 2, 2 * o.k - 3, *o.seed);
    h = tuza_construction(o.n, o.k, d);
    params["blocks"] = d.blocks.size();
  } else if (o.family == "clique-link") {
    if (!o.link.empty()) h = clique_plus_link(o.n, o.k, load_graph(o.link));
    else if (o.k == 3) h = clique_plus_link(o.n, o.k, triangle_packing_link(o.n - 1));
    else throw UsageError("clique-link needs --link unless k = 3");
    params["link"] = o.link.empty() ? "triangle-packing" : o.link;
  } else if (o.family == "random") {
    if (!o.seed) throw UsageError("gen --family random needs --seed");
    h = random_graph(o.n, o.k, o.p, *o.seed);
    params["p"] = o.p;
  } else if (o.family == "complete") {
    h = complete(o.n, o.k);
  } else {
    throw UsageError("unknown family '" + o.family + "'");
  }
  emit_graph(h, o.out, out);
  if (o.json_out) {
    params["edges"] = h.edge_count();
    out << run_record("gen", params, o.seed, "ok", ms_since(t0), {o.out}).dump() << '\n';
  }
  return kOk;
}

// ---- solve --------------------------------------------------------------------

struct SolveOpts {
  std::string in;
  std::uint32_t l = 1;
  std::uint64_t budget = 0;
  unsigned threads = 1;
  bool no_symmetry = false;
  bool json_out = false;
};

int cmd_solve(const SolveOpts& o, std::ostream& out) {
  const auto t0 = Clock::now();
  const Hypergraph h = load_graph(o.in);
  SearchConfig cfg;
  cfg.node_budget = o.budget;
  cfg.threads = std::max(1u, o.threads);
  cfg.symmetry_reduction = !o.no_symmetry;
  const auto r = find_hamcycle(h, o.l, cfg);
  const int code = r.outcome == SearchOutcome::found ? kOk : r.outcome == SearchOutcome::refuted ? kNone : kBudget;
  if (o.json_out) {
    json params{{"in", o.in}, {"l", o.l}, {"budget", o.budget}, {"threads", cfg.threads}, {"symmetry", cfg.symmetry_reduction}};
    auto rec = run_record("solve", params, std::nullopt, to_string(r.outcome), ms_since(t0), {o.in});
    rec["nodes"] = r.nodes;
    rec["witness"] = r.ordering ? json(*r.ordering) : json(nullptr);
    out << rec.dump() << '\n';
  } else {
    out << to_string(r.outcome) << '\n';
    if (r.ordering) out << join(*r.ordering) << '\n';
  }
  return code;
}

// ---- ex / verify-thm1 -----------------------------------------------------------

struct ExOpts {
  std::uint32_t n = 0, k = 2, l = 1, t = 0;
  std::string kind = "path";
  std::uint64_t budget = 0;
  std::string cache;
  unsigned threads = 1;
  bool json_out = false;
};

int cmd_ex(const ExOpts& o, std::ostream& out) {
  const auto t0 = Clock::now();
  const TightPattern p = build_pattern(parse_kind(o.kind), o.k, o.l, o.t == 0 ? o.n : o.t);
  ExtremalOptions eo;
  eo.node_budget = o.budget;
  eo.cache_path = o.cache;
  eo.threads = o.threads;
  const auto r = exact_ex(o.n, p, eo);
  if (o.json_out) {
    json params{{"n", o.n}, {"pattern", p.describe()}, {"budget", o.budget}, {"cache", o.cache}};
    auto rec = run_record("ex", params, std::nullopt, "ok", ms_since(t0),
                          o.cache.empty() ? std::vector<std::string>{} : std::vector<std::string>{o.cache});
    rec["value"] = r.value;
    rec["witness"] = r.witness.edges();
    rec["certificate"] = {{"copies", r.certificate.copies},
                          {"hitting_set_size", r.certificate.hitting_set_size},
                          {"root_lower_bound", r.certificate.root_lower_bound},
                          {"greedy_upper_bound", r.certificate.greedy_upper_bound},
                          {"nodes", r.certificate.nodes}};
    rec["from_cache"] = r.from_cache;
    out << rec.dump() << '\n';
  } else {
    out << "ex(" << o.n << ", " << p.describe() << ") = " << r.value << "  (tau " << r.certificate.hitting_set_size
        << ", root bound " << r.certificate.root_lower_bound << ", nodes " << r.certificate.nodes << ")\n";
  }
  return kOk;
}

int cmd_verify_thm1(const ExOpts& o, std::ostream& out) {
  const auto t0 = Clock::now();
  ExtremalOptions eo;
  eo.node_budget = o.budget;
  eo.cache_path = o.cache;
  eo.threads = o.threads;
  const std::uint64_t rhs = theorem1_rhs(o.n, o.k, o.l, eo);
  std::optional<std::uint64_t> lhs;
  std::string why;
  try {
    lhs = exact_ex(o.n, build_pattern(PatternKind::cycle, o.k, o.l, o.n), eo).value;
  } catch (const BudgetExhausted& e) {
    why = e.what();
  } catch (const std::length_error& e) {
    why = e.what();
  }
  const std::string verdict = !lhs ? "RHS-ONLY" : *lhs == rhs ? "MATCH" : "DIFFER";
  if (o.json_out) {
    json params{{"n", o.n}, {"k", o.k}, {"l", o.l}, {"budget", o.budget}};
    auto rec = run_record("verify-thm1", params, std::nullopt, verdict, ms_since(t0), {});
    rec["rhs"] = rhs;
    rec["exact"] = lhs ? json(*lhs) : json(nullptr);
    if (!why.empty()) rec["exact_unavailable"] = why;
    out << rec.dump() << '\n';
  } else {
    out << "rhs C(n-1,k) + ex(n-1, P(k,l)) = " << rhs << '\n';
    if (lhs) out << "exact ex(n, C(k,l,n)) = " << *lhs << '\n';
    else out << "exact ex(n, C(k,l,n)) unavailable: " << why << '\n';
    out << verdict << '\n';
  }
  return kOk;
}

// ---- pipeline -----------------------------------------------------------------

struct PipelineOpts {
  std::string in, trace;
  std::uint32_t l = 0;
  std::uint64_t seed = 0;
  std::optional<double> gamma, beta, rho, epsilon;
  unsigned attempts = 30;
  bool json_out = false;
};

int cmd_pipeline(const PipelineOpts& o, std::ostream& out) {
  const auto t0 = Clock::now();
  const Hypergraph h = load_graph(o.in);
  PipelineConfig cfg;
  if (o.gamma || o.beta || o.rho || o.epsilon) {
    const PipelineConfig base = default_constants(h.k());
    cfg = override_constants(h.k(), o.gamma.value_or(base.gamma), o.beta.value_or(base.beta), o.rho, o.epsilon, o.seed);
  } else {
    cfg = default_constants(h.k());
    cfg.seed = o.seed;
  }
  cfg.pipeline_attempts = o.attempts;
  const auto r = run_pipeline(h, o.l, cfg);
  if (!o.trace.empty()) {
    std::ofstream f(o.trace);
    if (!f) throw std::runtime_error("cannot write trace '" + o.trace + "'");
    f << r.trace.to_json().dump(2) << '\n';
  }
  if (o.json_out) {
    json params{{"in", o.in}, {"l", o.l}, {"mode", r.trace.mode}, {"gamma", cfg.gamma}, {"beta", cfg.beta},
                {"rho", cfg.params.rho}, {"epsilon", cfg.params.epsilon}, {"attempts", cfg.pipeline_attempts}};
    auto rec = run_record("pipeline", params, o.seed, r.trace.outcome, ms_since(t0),
                          o.trace.empty() ? std::vector<std::string>{} : std::vector<std::string>{o.in, o.trace});
    rec["cycle"] = r.cycle ? json(*r.cycle) : json(nullptr);
    if (!r.cycle) rec["failure_stage"] = r.trace.failure_stage;
    out << rec.dump() << '\n';
  } else if (r.cycle) {
    out << "cycle\n" << join(*r.cycle) << '\n';
  } else {
    out << "failed at " << r.trace.failure_stage << '\n';
  }
  return r.cycle ? kOk : kStageFailure;
}

// ---- scan ---------------------------------------------------------------------

struct ScanOpts {
  std::uint32_t k = 2, l = 1, d = 1;
  std::string range;
  std::uint64_t samples = 20, seed = 0, budget = 1'000'000;
  std::string csv, mode = "auto";
  unsigned threads = 1;
};

// Adds random missing edges until every d-set reaches degree h (d = 0: edge count).
void raise_min_degree(Hypergraph& g, std::uint32_t d, std::uint64_t h, std::mt19937_64& rng) {
  const std::uint32_t n = g.n(), k = g.k();
  if (d == 0) {
    std::vector<std::uint64_t> missing;
    for (std::uint64_t r = 0; r < g.kset_count(); ++r)
      if (!g.has_rank(r)) missing.push_back(r);
    std::shuffle(missing.begin(), missing.end(), rng);
    for (std::size_t i = 0; g.edge_count() < h && i < missing.size(); ++i) g.add_rank(missing[i]);
    return;
  }
  std::vector<VertexTuple> dsets;
  for_each_subset(n, d, [&](std::span<const Vertex> s) { dsets.emplace_back(s.begin(), s.end()); });
  std::shuffle(dsets.begin(), dsets.end(), rng);
  for (const auto& s : dsets) {
    std::uint64_t deg = degree(g, s);
    if (deg >= h) continue;
    std::vector<Vertex> rest;
    for (Vertex v = 0; v < n; ++v)
      if (std::find(s.begin(), s.end(), v) == s.end()) rest.push_back(v);
    std::vector<VertexTuple> cands;
    for_each_subset(static_cast<std::uint32_t>(rest.size()), k - d, [&](std::span<const Vertex> idx) {
      VertexTuple e(s);
      for (auto i : idx) e.push_back(rest[i]);
      if (!g.has_edge(e)) cands.push_back(std::move(e));
    });
    std::shuffle(cands.begin(), cands.end(), rng);
    for (std::size_t i = 0; deg < h && i < cands.size(); ++i, ++deg) g.add_edge(cands[i]);
  }
}

int cmd_scan(const ScanOpts& o, std::ostream& out) {
  std::uint32_t lo = 0, hi = 0;
  {
    const auto colon = o.range.find(':');
    if (colon == std::string::npos) throw UsageError("--n-range must look like LO:HI");
    try {
      lo = static_cast<std::uint32_t>(std::stoul(o.range.substr(0, colon)));
      hi = static_cast<std::uint32_t>(std::stoul(o.range.substr(colon + 1)));
    } catch (const std::exception&) {
      throw UsageError("--n-range must look like LO:HI");
    }
  }
  if (o.mode != "auto" && o.mode != "exact" && o.mode != "sampled") throw UsageError("--mode must be auto, exact or sampled");
  if (o.l >= o.k || o.d >= o.k) throw UsageError("need l < k and d < k");

  std::ofstream file;
  std::ostream* sink = &out;
  if (!o.csv.empty() && o.csv != "-") {
    file.open(o.csv);
    if (!file) throw std::runtime_error("cannot write '" + o.csv + "'");
    sink = &file;
  }
  *sink << "n,k,l,d,mode,value,ci_low,ci_high,seed\n";
  std::mt19937_64 rng(o.seed);
  for (std::uint32_t n = lo; n <= hi && hi >= lo; ++n) {
    if (n <= o.k || n % (o.k - o.l) != 0) continue;
    const bool small = binom(n, o.k) <= kExactHMaxKSets;
    const bool exact = o.mode == "exact" || (o.mode == "auto" && small);
    if (exact) {
      ExtremalOptions eo;
      eo.node_budget = o.budget;
      const auto r = exact_h(n, o.k, o.l, o.d, eo);
      *sink << n << ',' << o.k << ',' << o.l << ',' << o.d << ",exact," << r.value << ',' << r.value << ','
            << r.value << ',' << o.seed << '\n';
      continue;
    }
    // Bisection on h over sampled graphs with delta_d >= h.
    SearchConfig sc;
    sc.node_budget = o.budget;
    sc.threads = std::max(1u, o.threads);
    const std::uint64_t top = binom(n - o.d, o.k - o.d);
    std::uint64_t certified = 0;  // 1 + max delta_d over non-Hamiltonian samples
    auto all_ham = [&](std::uint64_t h) {
      bool ok = true;
      std::uniform_real_distribution<double> dens(0.0, 0.3);
      for (std::uint64_t s = 0; s < o.samples; ++s) {
        Hypergraph g = random_graph(n, o.k, dens(rng), rng());
        raise_min_degree(g, o.d, h, rng);
        const auto r = find_hamcycle(g, o.l, sc);
        if (r.outcome == SearchOutcome::refuted) {
          certified = std::max<std::uint64_t>(certified, min_degree(g, o.d) + 1);
          ok = false;
        } else if (r.outcome == SearchOutcome::budget_exhausted) {
          ok = false;
        }
      }
      return ok;
    };
    std::uint64_t a = 0, b = top;  // all_ham(b) assumed: complete graph is Hamiltonian
    while (a < b) {
      const std::uint64_t mid = a + (b - a) / 2;
      if (all_ham(mid)) b = mid;
      else a = mid + 1;
    }
    *sink << n << ',' << o.k << ',' << o.l << ',' << o.d << ",sampled," << a << ',' << std::min(certified, a) << ','
          << a << ',' << o.seed << '\n';
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hamiltonicity tools for uniform hypergraphs", "tighthyp"};
  app.require_subcommand(1);

  GenOpts gen;
  auto* g = app.add_subcommand("gen", "write a construction or random graph");
  g->add_option("--family", gen.family, "ore | kk | tuza | clique-link | random | complete")->required();
  g->add_option("--n", gen.n, "vertex count")->required();
  g->add_option("--k", gen.k, "uniformity");
  g->add_option("--p", gen.p, "edge probability (random)");
  g->add_option("--seed", gen.seed, "RNG seed (random, tuza)");
  g->add_option("--link", gen.link, "link graph file (clique-link)");
  g->add_option("--out", gen.out, "output file (default stdout)");
  g->add_flag("--json", gen.json_out, "print a run record");

  SolveOpts solve;
  auto* s = app.add_subcommand("solve", "exact l-tight Hamiltonian cycle search");
  s->add_option("--in", solve.in, "graph file ('-' for stdin)")->required();
  s->add_option("--l", solve.l, "tightness")->required();
  s->add_option("--budget", solve.budget, "node budget (0 = unlimited)");
  s->add_option("--threads", solve.threads, "worker threads");
  s->add_flag("--no-symmetry", solve.no_symmetry, "disable anchoring and reflection pruning");
  s->add_flag("--json", solve.json_out, "print a run record");

  ExOpts ex;
  auto* e = app.add_subcommand("ex", "exact extremal number by hitting-set branch and bound");
  e->add_option("--n", ex.n, "host vertex count")->required();
  e->add_option("--k", ex.k, "pattern uniformity")->required();
  e->add_option("--kind", ex.kind, "path | cycle");
  e->add_option("--l", ex.l, "pattern tightness");
  e->add_option("--t", ex.t, "pattern vertex count (default n)");
  e->add_option("--budget", ex.budget, "node budget (0 = unlimited)");
  e->add_option("--cache", ex.cache, "JSON result cache");
  e->add_option("--threads", ex.threads, "worker threads");
  e->add_flag("--json", ex.json_out, "print a run record");

  ExOpts vt;
  auto* v = app.add_subcommand("verify-thm1", "compare ex(n, C(k,l,n)) with C(n-1,k) + ex(n-1, P(k,l))");
  v->add_option("--n", vt.n, "vertex count")->required();
  v->add_option("--k", vt.k, "uniformity")->required();
  v->add_option("--l", vt.l, "tightness")->required();
  v->add_option("--budget", vt.budget, "node budget (0 = unlimited)");
  v->add_option("--cache", vt.cache, "JSON result cache");
  v->add_option("--threads", vt.threads, "worker threads");
  v->add_flag("--json", vt.json_out, "print a run record");

  PipelineOpts pl;
  auto* p = app.add_subcommand("pipeline", "randomized absorbing construction of a Hamiltonian cycle");
  p->add_option("--in", pl.in, "graph file ('-' for stdin)")->required();
  p->add_option("--l", pl.l, "tightness")->required();
  p->add_option("--seed", pl.seed, "RNG seed")->required();
  p->add_option("--gamma", pl.gamma, "absorber density (override)");
  p->add_option("--beta", pl.beta, "connector density (override)");
  p->add_option("--rho", pl.rho, "good-tuple base (override)");
  p->add_option("--epsilon", pl.epsilon, "peeling slack (override)");
  p->add_option("--attempts", pl.attempts, "restarts of the randomized stages");
  p->add_option("--trace", pl.trace, "write the stage trace as JSON");
  unsigned pl_threads = 1;
  p->add_option("--threads", pl_threads, "worker threads");
  p->add_flag("--json", pl.json_out, "print a run record");

  ScanOpts sc;
  auto* c = app.add_subcommand("scan", "threshold h^l_d(k,n) over a range of n, as CSV");
  c->add_option("--k", sc.k, "uniformity")->required();
  c->add_option("--l", sc.l, "tightness")->required();
  c->add_option("--d", sc.d, "degree level")->required();
  c->add_option("--n-range", sc.range, "LO:HI")->required();
  c->add_option("--samples", sc.samples, "graphs per bisection step (sampled mode)");
  c->add_option("--seed", sc.seed, "RNG seed")->required();
  c->add_option("--budget", sc.budget, "solver node budget per graph");
  c->add_option("--mode", sc.mode, "auto | exact | sampled");
  c->add_option("--csv", sc.csv, "output file (default stdout)");
  c->add_option("--threads", sc.threads, "worker threads");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(std::move(rev));
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*g) return cmd_gen(gen, out);
    if (*s) return cmd_solve(solve, out);
    if (*e) return cmd_ex(ex, out);
    if (*v) return cmd_verify_thm1(vt, out);
    if (*p) return cmd_pipeline(pl, out);
    if (*c) return cmd_scan(sc, out);
  } catch (const BudgetExhausted& be) {
    err << "budget exhausted: " << be.what() << '\n';
    return kBudget;
  } catch (const StageFailure& sf) {
    err << "stage failure: " << sf.what() << '\n';
    return kStageFailure;
  } catch (const UsageError& ue) {
    err << "usage: " << ue.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& ia) {
    err << "invalid argument: " << ia.what() << '\n';
    return kUsage;
  } catch (const std::exception& ex_) {
    err << "error: " << ex_.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace tighthyp::cli
