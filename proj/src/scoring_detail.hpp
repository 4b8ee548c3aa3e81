#pragma once

// Shared per-candidate scoring used by the OpenMP and serial kernels.

#include <algorithm>
#include <cmath>
#include <span>

#include "kcap/error.hpp"
#include "kcap/kcap_engine.hpp"

namespace kcap::detail {

class ActiveScorer {
 public:
  ActiveScorer(const GraphModel& graph, std::span<const VertexId> active, const ScoringOptions& options,
               const EdgeKey& key)
      : graph_(graph),
        kernel_(graph.kernel()),
        active_(active.begin(), active.end()),
        options_(options),
        active_pos_(graph.positions().subset(active_)) {
    rows_.reserve(active_.size());
    for (VertexId y : active_) rows_.push_back(key.row(y));
    if (!options.exact()) {
      cut2_ = options.cutoff * options.cutoff;
      const double min_cell = std::pow(2.0, -60.0 / static_cast<double>(graph.dim()));
      grid_ = GridIndex(active_pos_, std::max(options.cutoff, min_cell));
    }
  }

  std::uint32_t operator()(VertexId x) const {
    std::uint32_t count = 0;
    const auto px = graph_.position(x);
    if (options_.exact()) {
      for (std::size_t slot = 0; slot < active_.size(); ++slot) count += draw(slot, x, px);
      return count;
    }
    const std::size_t d = px.size();
    const double* coords = active_pos_.flat().data();
    grid_.visit(px, options_.cutoff, [&](std::span<const std::uint32_t> slots) {
      for (auto slot : slots) {
        double r2;
        if (d == 1) {
          const double dx = coords[slot] - px[0];
          r2 = dx * dx;
        } else {
          r2 = squared_distance({coords + slot * d, d}, px);
        }
        if (r2 <= cut2_ && (active_[slot] != x || options_.self_edges))
          count += kernel_.accepts(EdgeKey::uniform_from_row(rows_[slot], x), r2);
      }
    });
    return count;
  }

 private:
  // Same decision as GraphModel::edge_present with the row hash reused.
  bool draw(std::size_t slot, VertexId x, std::span<const double> px) const noexcept {
    if (active_[slot] == x && !options_.self_edges) return false;
    return kernel_.accepts(EdgeKey::uniform_from_row(rows_[slot], x), squared_distance(active_pos_[slot], px));
  }

  const GraphModel& graph_;
  Kernel kernel_;
  std::vector<VertexId> active_;
  ScoringOptions options_;
  PointSet active_pos_;
  std::vector<std::uint64_t> rows_;
  double cut2_ = 0.0;
  GridIndex grid_;
};

inline void validate_active(const GraphModel& graph, std::span<const VertexId> active) {
  for (VertexId y : active) require(y < graph.size(), "synaptic_input: active id out of range");
}

inline std::vector<VertexId> resolve_candidates(const GraphModel& graph, std::span<const VertexId> active,
                                                const ScoringOptions& options,
                                                std::optional<std::span<const VertexId>> candidates) {
  if (!candidates) return candidate_vertices(graph, active, options);
  std::vector<VertexId> ids(candidates->begin(), candidates->end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (VertexId v : ids) require(v < graph.size(), "synaptic_input: candidate id out of range");
  return ids;
}

}  // namespace kcap::detail
