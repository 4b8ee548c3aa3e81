#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kcap/geometry.hpp"

namespace kcap {

/// One cluster of the active set and its smallest enclosing ball.
struct ClusterSummary {
  Ball ball;
  std::vector<std::uint32_t> members;  // sorted vertex ids

  std::size_t member_count() const noexcept { return members.size(); }
};

/// Record for A_t. The cap fields describe the step A_t -> A_{t+1} and are
/// empty on the last record of a run.
struct StepRecord {
  std::size_t t = 0;
  std::vector<std::uint32_t> members;
  std::optional<std::int64_t> threshold;
  std::size_t certain_count = 0;
  std::size_t tie_pool_size = 0;
  std::vector<ClusterSummary> clusters;
  double max_radius = 0.0;
  double min_radius = 0.0;
  std::size_t overlap_prev = 0;  // |A_t ∩ A_{t-1}|
  std::size_t overlap_past = 0;  // |A_t ∩ (A_0 ∪ ... ∪ A_{t-1})|
  double wall_seconds = 0.0;     // not serialized by default
};

struct RunTrace {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t d = 1;
  double sigma = 0.0;
  double separation = 0.0;
  std::vector<StepRecord> steps;

  /// First step whose active set forms a single cluster.
  std::optional<std::size_t> first_single_cluster() const {
    for (const auto& s : steps)
      if (s.clusters.size() == 1) return s.t;
    return std::nullopt;
  }
};

}  // namespace kcap
