#include "kcap/kcap_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iterator>

#include "kcap/error.hpp"
#include "kcap/metrics.hpp"

namespace kcap {

namespace {
constexpr std::uint64_t kInitStream = 0xa0;
constexpr std::uint64_t kTieStream = 0x71e;
}  // namespace

std::uint32_t SynapticInput::at(VertexId v) const {
  auto it = std::lower_bound(ids.begin(), ids.end(), v);
  if (it == ids.end() || *it != v) return 0;
  return counts[static_cast<std::size_t>(it - ids.begin())];
}

std::vector<VertexId> candidate_vertices(const GraphModel& graph, std::span<const VertexId> active,
                                         const ScoringOptions& options) {
  const std::size_t n = graph.size();
  std::vector<VertexId> out;
  if (options.exact()) {
    out.resize(n);
    for (std::size_t v = 0; v < n; ++v) out[v] = static_cast<VertexId>(v);
    return out;
  }
  std::vector<std::uint64_t> keys;
  for (VertexId y : active) graph.index().cells_near(graph.position(y), options.cutoff, keys);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  std::size_t total = 0;
  for (auto key : keys) total += graph.index().bucket_by_key(key).size();
  if (total * 16 < n) {
    // Few candidates: sort them instead of scanning a full bitmap.
    out.reserve(total);
    for (auto key : keys) {
      auto ids = graph.index().bucket_by_key(key);
      out.insert(out.end(), ids.begin(), ids.end());
    }
    std::sort(out.begin(), out.end());
    return out;
  }
  std::vector<char> mark(n, 0);
  for (auto key : keys)
    for (auto v : graph.index().bucket_by_key(key)) mark[v] = 1;
  out.reserve(total);
  for (std::size_t v = 0; v < n; ++v)
    if (mark[v]) out.push_back(static_cast<VertexId>(v));
  return out;
}

CapResult select_cap(const SynapticInput& input, std::size_t k, Stream& rng) {
  const std::size_t n = input.n;
  require(k >= 1, "select_cap: k must be at least 1");
  require(k <= n, "select_cap: k exceeds the number of vertices");
  require(input.ids.size() == input.counts.size(), "select_cap: malformed input");

  std::uint32_t max_f = 0;
  std::uint32_t min_f = input.ids.size() < n ? 0 : UINT32_MAX;
  for (auto c : input.counts) {
    max_f = std::max(max_f, c);
    min_f = std::min(min_f, c);
  }
  // hist[f] = |{x : F(x) = f}|, implicit zeros included.
  std::vector<std::size_t> hist(static_cast<std::size_t>(max_f) + 1, 0);
  for (auto c : input.counts) ++hist[c];
  hist[0] += n - input.ids.size();

  std::int64_t threshold = 0;
  if (k == n) {
    // Every integer below min F satisfies the rule; take the largest such, floored at 0.
    threshold = std::max<std::int64_t>(0, static_cast<std::int64_t>(min_f) - 1);
  } else {
    std::size_t above = 0;  // |{F > c}|
    threshold = max_f;
    for (std::int64_t c = max_f; c >= 1; --c) {
      above += hist[static_cast<std::size_t>(c)];
      if (above > k) break;
      threshold = c - 1;
    }
  }

  CapResult result;
  result.threshold = threshold;
  std::vector<VertexId> chosen;
  chosen.reserve(k);
  for (std::size_t i = 0; i < input.ids.size(); ++i)
    if (static_cast<std::int64_t>(input.counts[i]) > threshold) chosen.push_back(input.ids[i]);
  result.certain_count = chosen.size();
  result.tie_pool_size = threshold <= static_cast<std::int64_t>(max_f) ? hist[static_cast<std::size_t>(threshold)] : 0;

  const std::size_t need = k - result.certain_count;
  if (need > 0) {
    const auto picks = sample_without_replacement(result.tie_pool_size, need, rng);
    // Walk the tie pool in id order; with C = 0 it includes the implicit zeros.
    std::size_t rank = 0, next_pick = 0, explicit_pos = 0;
    auto consider = [&](VertexId v) {
      if (next_pick < picks.size() && picks[next_pick] == rank) {
        chosen.push_back(v);
        ++next_pick;
      }
      ++rank;
    };
    if (threshold == 0) {
      for (std::size_t v = 0; v < n && next_pick < picks.size(); ++v) {
        while (explicit_pos < input.ids.size() && input.ids[explicit_pos] < v) ++explicit_pos;
        const bool listed = explicit_pos < input.ids.size() && input.ids[explicit_pos] == v;
        if (!listed || input.counts[explicit_pos] == 0) consider(static_cast<VertexId>(v));
      }
    } else {
      for (std::size_t i = 0; i < input.ids.size() && next_pick < picks.size(); ++i)
        if (static_cast<std::int64_t>(input.counts[i]) == threshold) consider(input.ids[i]);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  result.next.members = std::move(chosen);
  return result;
}

ScoringOptions scoring_options(const GraphModel& graph, std::size_t k, const EngineConfig& config) {
  ScoringOptions options;
  options.self_edges = config.self_edges;
  if (!config.exact) {
    const double r = truncation_radius(graph.kernel(), graph.size(), k, config.epsilon);
    // Beyond the cube diagonal a cutoff drops nothing.
    if (r < std::sqrt(static_cast<double>(graph.dim()))) options.cutoff = r;
  }
  return options;
}

double default_separation(double sigma, std::size_t n) {
  return 2.0 * sigma * std::sqrt(std::log(static_cast<double>(std::max<std::size_t>(n, 2))));
}

Process::Process(const GraphModel& graph, std::size_t k, std::uint64_t init_seed, std::uint64_t process_seed,
                 RunOptions options)
    : Process(graph,
              [&] {
                require(k >= 1 && k <= graph.size(), "run: k must lie in [1, n]");
                Stream stream(derive_seed(init_seed, 0, kInitStream));
                ActiveSet initial;
                for (auto v : sample_without_replacement(graph.size(), k, stream))
                  initial.members.push_back(static_cast<VertexId>(v));
                return initial;
              }(),
              process_seed, options) {}

Process::Process(const GraphModel& graph, ActiveSet initial, std::uint64_t process_seed, RunOptions options)
    : graph_(&graph),
      k_(initial.members.size()),
      process_seed_(process_seed),
      options_(options),
      current_(std::move(initial)),
      seen_(graph.size(), 0) {
  require(k_ >= 1 && k_ <= graph.size(), "process: active set size must lie in [1, n]");
  std::sort(current_.members.begin(), current_.members.end());
  require(std::adjacent_find(current_.members.begin(), current_.members.end()) == current_.members.end(),
          "process: duplicate active ids");
  require(current_.members.back() < graph.size(), "process: active id out of range");
  scoring_ = scoring_options(graph, k_, options_.engine);
  const double sigma = graph.kernel().scale();
  trace_.n = graph.size();
  trace_.k = k_;
  trace_.d = graph.dim();
  trace_.sigma = sigma;
  trace_.separation = options_.separation > 0.0 ? options_.separation : default_separation(sigma, graph.size());
  record_current(0.0);
}

void Process::record_current(double seconds) {
  StepRecord rec;
  rec.t = current_.step;
  rec.members = current_.members;
  rec.clusters = cluster_active_set(graph_->positions(), current_.members, trace_.separation);
  rec.max_radius = 0.0;
  rec.min_radius = rec.clusters.empty() ? 0.0 : rec.clusters.front().ball.radius;
  for (const auto& c : rec.clusters) {
    rec.max_radius = std::max(rec.max_radius, c.ball.radius);
    rec.min_radius = std::min(rec.min_radius, c.ball.radius);
  }
  if (!trace_.steps.empty()) {
    const auto& prev = trace_.steps.back().members;
    std::vector<VertexId> common;
    std::set_intersection(prev.begin(), prev.end(), rec.members.begin(), rec.members.end(),
                          std::back_inserter(common));
    rec.overlap_prev = common.size();
    for (auto v : rec.members) rec.overlap_past += seen_[v] != 0;
  }
  for (auto v : rec.members) seen_[v] = 1;
  rec.wall_seconds = seconds;
  trace_.steps.push_back(std::move(rec));
}

const CapResult& Process::step() {
  const auto start = std::chrono::steady_clock::now();
  const auto input = synaptic_input(*graph_, current_.members, scoring_, graph_->edge_key());
  Stream tie_stream(derive_seed(process_seed_, current_.step, kTieStream));
  last_ = select_cap(input, k_, tie_stream);
  last_.next.step = current_.step + 1;

  auto& rec = trace_.steps.back();
  rec.threshold = last_.threshold;
  rec.certain_count = last_.certain_count;
  rec.tie_pool_size = last_.tie_pool_size;

  const double previous_radius = rec.max_radius;
  current_ = last_.next;
  const auto stop = std::chrono::steady_clock::now();
  record_current(std::chrono::duration<double>(stop - start).count());

  const double moved = std::abs(trace_.steps.back().max_radius - previous_radius);
  stable_steps_ = moved < options_.stop.radius_tolerance * trace_.sigma ? stable_steps_ + 1 : 0;
  return last_;
}

bool Process::stop_rule_met() const {
  return current_.step >= options_.stop.max_steps ||
         (options_.stop.patience > 0 && stable_steps_ >= options_.stop.patience);
}

RunTrace run(const GraphModel& graph, std::size_t k, std::uint64_t init_seed, std::uint64_t process_seed,
             const RunOptions& options) {
  require(options.stop.max_steps >= 1, "run: max_steps must be at least 1");
  Process process(graph, k, init_seed, process_seed, options);
  while (!process.stop_rule_met()) process.step();
  return process.take_trace();
}

}  // namespace kcap
