#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "kcap/random_graph.hpp"
#include "kcap/rng.hpp"
#include "kcap/trace.hpp"

namespace kcap {

/// The k vertices firing at one step, sorted by id.
struct ActiveSet {
  std::size_t step = 0;
  std::vector<VertexId> members;
};

/// F_t restricted to a sorted candidate list; every other vertex has F = 0.
struct SynapticInput {
  std::size_t n = 0;
  std::vector<VertexId> ids;
  std::vector<std::uint32_t> counts;

  std::uint32_t at(VertexId v) const;
};

struct ScoringOptions {
  /// Pairs farther apart than this are not drawn. Infinity means exact mode.
  double cutoff = std::numeric_limits<double>::infinity();
  /// Count the edge y->y when y is itself active.
  bool self_edges = true;

  bool exact() const noexcept { return !(cutoff < std::numeric_limits<double>::infinity()); }
};

/// Vertices that can receive input: all vertices in exact mode, otherwise the
/// vertices in grid cells within the cutoff of some active vertex. Sorted.
std::vector<VertexId> candidate_vertices(const GraphModel& graph, std::span<const VertexId> active,
                                         const ScoringOptions& options);

/// F_t(x) for every candidate, OpenMP-parallel over candidates.
SynapticInput synaptic_input(const GraphModel& graph, std::span<const VertexId> active,
                             const ScoringOptions& options, const EdgeKey& key,
                             std::optional<std::span<const VertexId>> candidates = std::nullopt);
/// Single-threaded reference for synaptic_input; identical results.
SynapticInput synaptic_input_serial(const GraphModel& graph, std::span<const VertexId> active,
                                    const ScoringOptions& options, const EdgeKey& key,
                                    std::optional<std::span<const VertexId>> candidates = std::nullopt);

struct CapResult {
  ActiveSet next;
  std::int64_t threshold = 0;
  std::size_t certain_count = 0;
  std::size_t tie_pool_size = 0;
};

/// k-cap selection. The threshold C is the smallest integer with
/// |{F > C}| <= k; the vertices above it all fire and the rest of the cap is
/// drawn uniformly without replacement from {F = C} (sorted by id).
CapResult select_cap(const SynapticInput& input, std::size_t k, Stream& rng);

struct EngineConfig {
  bool exact = false;
  double epsilon = 1e-6;
  bool self_edges = true;
};

ScoringOptions scoring_options(const GraphModel& graph, std::size_t k, const EngineConfig& config);

/// Stop when the largest cluster radius moves by less than
/// radius_tolerance * sigma for `patience` consecutive steps, or at max_steps.
struct StopRule {
  std::size_t max_steps = 200;
  double radius_tolerance = 1e-4;
  std::size_t patience = 5;
};

struct RunOptions {
  EngineConfig engine;
  StopRule stop;
  double separation = 0.0;  // <= 0: 2 sigma sqrt(ln n)
};

/// Mutable state of one k-cap run over a fixed graph.
class Process {
 public:
  Process(const GraphModel& graph, std::size_t k, std::uint64_t init_seed, std::uint64_t process_seed,
          RunOptions options = {});
  Process(const GraphModel& graph, ActiveSet initial, std::uint64_t process_seed, RunOptions options = {});

  const ActiveSet& current() const noexcept { return current_; }
  const RunTrace& trace() const noexcept { return trace_; }
  RunTrace take_trace() { return std::move(trace_); }
  std::size_t k() const noexcept { return k_; }
  const ScoringOptions& scoring() const noexcept { return scoring_; }

  /// Advances A_t -> A_{t+1} and appends the record of A_{t+1}.
  const CapResult& step();
  bool stop_rule_met() const;

 private:
  void record_current(double seconds);

  const GraphModel* graph_;
  std::size_t k_;
  std::uint64_t process_seed_;
  RunOptions options_;
  ScoringOptions scoring_;
  ActiveSet current_;
  CapResult last_;
  RunTrace trace_;
  std::vector<char> seen_;  // vertices active at some earlier step
  std::size_t stable_steps_ = 0;
};

/// A_0 uniform over k-subsets, then steps until the stop rule or max_steps.
RunTrace run(const GraphModel& graph, std::size_t k, std::uint64_t init_seed, std::uint64_t process_seed,
             const RunOptions& options);

double default_separation(double sigma, std::size_t n);

}  // namespace kcap
