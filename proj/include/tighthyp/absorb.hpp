#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tighthyp/hypergraph.hpp"
#include "tighthyp/motifs.hpp"

namespace tighthyp {

struct PipelineConfig {
  GoodTupleParams params;
  double gamma = 0;
  double beta = 0;
  std::uint64_t seed = 0;
  unsigned stage_retries = 20;     // absorbers / connectors resampling
  unsigned join_retries = 2000;    // per join in stitch_onepath
  unsigned pipeline_attempts = 30; // restarts of steps 2-8
  std::size_t demand_pairs = 16;   // sampled good pairs a connector must serve
  bool override_constants = false;
};

/// epsilon = 1/(22 (1280k^3)^(k-1)), rho = (22 epsilon)^(1/(k-1)),
/// gamma = 1/(64k^2), beta = 1/(1280k^3).
PipelineConfig default_constants(std::uint32_t k);

/// Desk-scale constants. With rho given and epsilon not, epsilon = rho^(k-1).
PipelineConfig override_constants(std::uint32_t k, double gamma, double beta, std::optional<double> rho,
                                  std::optional<double> epsilon = std::nullopt, std::uint64_t seed = 0);

struct StageFailure : std::runtime_error {
  StageFailure(std::string stage_name, const std::string& what)
      : std::runtime_error(stage_name + ": " + what), stage(std::move(stage_name)) {}
  std::string stage;
};

// Degrees of all i-subsets (1 <= i <= k-1) of an active vertex set, counted
// over edges inside it. Thresholds use the active count as n.
class DegreeCache {
public:
  DegreeCache(const Hypergraph& h, std::vector<char> active, double rho);
  DegreeCache(const Hypergraph& h, double rho);

  const Hypergraph& graph() const { return h_; }
  std::uint32_t k() const { return h_.k(); }
  std::uint32_t active_count() const { return n_active_; }
  bool active(Vertex v) const { return active_[v] != 0; }
  const std::vector<char>& active_mask() const { return active_; }
  double rho() const { return rho_; }

  std::uint64_t degree(std::span<const Vertex> s) const;  // any order, distinct, size 1..k-1
  bool good(std::span<const Vertex> x) const;             // (k-1)-tuple, active, distinct, prefix thresholds
  bool edge(std::span<const Vertex> e) const;              // k vertices, all active, an edge of H

private:
  const Hypergraph& h_;
  std::vector<char> active_;
  std::uint32_t n_active_ = 0;
  double rho_;
  std::vector<std::vector<std::uint32_t>> deg_;  // [i][colex rank]
  std::vector<long double> threshold_;            // [i]
  BinomialTable table_;
};

/// Stride-1 windows of `seq` are edges; windows containing `exempt` are skipped.
bool induces_tight_path(const Hypergraph& h, std::span<const Vertex> seq, std::optional<Vertex> exempt = std::nullopt);

/// Monte-Carlo probability that a uniform (2k-2)-tuple has distinct entries and
/// both ends (x1..x_{k-1}) and (x_{2k-2}..x_k) good.
double good_pair_fraction(const Hypergraph& h, const GoodTupleParams& params, std::uint64_t samples, std::uint64_t seed);

/// x and (x1..x_{k-1}, v, x_k..x_{2k-2}) both induce tight paths with good ends.
bool absorbs(const Hypergraph& h, std::span<const Vertex> x, Vertex v, const GoodTupleParams& params);
bool absorbs(const DegreeCache& dc, std::span<const Vertex> x, Vertex v);

/// The 2k-2 windows of (x_{k-1}..x_1, z_1..z_{k-1}, y_1..y_{k-1}) that meet z are edges.
/// Throws when x, y, z overlap or repeat entries.
bool connects(const Hypergraph& h, std::span<const Vertex> z, std::span<const Vertex> x, std::span<const Vertex> y);

struct AbsorberSet {
  std::vector<VertexTuple> tuples;
  std::vector<std::uint32_t> coverage;  // per vertex; 0 outside the active set
  std::uint64_t min_coverage = 0;
  std::uint64_t sampled = 0, rejected = 0, removed_overlap = 0;
  unsigned retries = 0;
  bool bounds_met = false;  // |A| <= 2 gamma n' and min coverage >= gamma n'/4
};

struct ConnectorSet {
  std::vector<VertexTuple> tuples;
  std::vector<std::pair<VertexTuple, VertexTuple>> demand;
  std::vector<std::uint32_t> pair_coverage;
  std::uint64_t min_coverage = 0;
  std::uint64_t sampled = 0, rejected = 0, removed_overlap = 0;
  unsigned retries = 0;
  bool bounds_met = false;  // |C| <= 2 beta n' and every pair covered >= beta n'/4
};

/// Coverage of v: absorbers in `tuples` that avoid v and absorb it.
std::vector<std::uint32_t> absorber_coverage(const DegreeCache& dc, const std::vector<VertexTuple>& tuples);

AbsorberSet build_absorbers(const DegreeCache& dc, const PipelineConfig& cfg, std::mt19937_64& rng);
AbsorberSet build_absorbers(const Hypergraph& h, const PipelineConfig& cfg);

ConnectorSet build_connectors(const DegreeCache& dc, const PipelineConfig& cfg, std::mt19937_64& rng,
                              std::span<const char> avoid = {});
ConnectorSet build_connectors(const Hypergraph& h, const PipelineConfig& cfg);

/// One tight path through every tuple of `tuples` (in order), joined by random
/// fresh (k-1)-tuples avoiding `forbidden`, the tuples and earlier joins.
VertexTuple stitch_onepath(const DegreeCache& dc, const std::vector<VertexTuple>& tuples,
                           std::span<const char> forbidden, const PipelineConfig& cfg, std::mt19937_64& rng);

/// Greedy extension of a good tight path, at the tail and then the head. Each
/// appended vertex keeps the new end good; the highest-degree such vertex wins,
/// ties by index. Stops when neither end can grow.
VertexTuple extend_path(const DegreeCache& dc, VertexTuple path, std::span<const char> forbidden);

// A fixed piece of the final cycle. Stride-1 windows through `exempt` are only
// required at the listed starts (relative to the segment).
struct Segment {
  VertexTuple order;
  std::optional<Vertex> exempt;
  std::vector<std::uint32_t> designated;
};

struct PeelResult {
  std::vector<char> active;
  std::vector<Vertex> peeled;
  std::uint32_t t = 0;
  int embed_case = 0;  // 0 none, 1 single low-degree vertex, 2 tight paths
  std::vector<Segment> segments;
  bool t_within_bound = true;        // t <= 2/epsilon
  bool case2_degree_ok = true;       // deg(v_i) >= C(n-1,k-1)/3
  double min_peeled_degree_ratio = 1;
};

PeelResult peel_and_embed(const Hypergraph& h, std::uint32_t l, const PipelineConfig& cfg);

struct PipelineTrace {
  std::string mode;  // "paper" or "override"
  std::vector<nlohmann::json> stages;
  unsigned attempts = 0;
  std::vector<std::string> attempt_failures;
  std::string outcome;        // "cycle" or "failed"
  std::string failure_stage;  // set when failed
  std::vector<std::string> notes;
  nlohmann::json to_json() const;
};

struct PipelineResult {
  std::optional<VertexTuple> cycle;  // windows at multiples of k-l are edges
  PipelineTrace trace;
};

PipelineResult run_pipeline(const Hypergraph& h, std::uint32_t l, const PipelineConfig& cfg);

}  // namespace tighthyp
