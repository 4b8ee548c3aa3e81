#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kcap/kcap_engine.hpp"
#include "kcap/trace.hpp"

namespace kcap {

/// Single-linkage clusters: two active vertices are linked when they are
/// closer than `separation`. Clusters are ordered by their smallest id.
std::vector<ClusterSummary> cluster_active_set(const PointSet& positions, std::span<const VertexId> active,
                                               double separation);

/// E[x] = sum_z g(x,z) and V[x]^2 = sum_z g(x,z)(1 - g(x,z)) over active points z.
struct InputProfile {
  std::vector<double> expected;
  std::vector<double> variance;
};

InputProfile expected_input_profile(const PointSet& active_positions, const Kernel& kernel,
                                    const PointSet& query_points);
InputProfile expected_input_profile_serial(const PointSet& active_positions, const Kernel& kernel,
                                           const PointSet& query_points);

struct GradientCheck {
  double max_ratio = 0.0;
  double max_derivative = 0.0;
  double bound = 0.0;  // (k / sigma) sqrt(d / e)
};

/// Largest central-difference directional derivative of E over the sample
/// points and `directions` random unit directions per point (plus the
/// coordinate axes), divided by (k / sigma) sqrt(d / e).
GradientCheck gradient_bound_check(const PointSet& active_positions, double sigma, const PointSet& sample_points,
                                   double h = 0.0, std::uint64_t seed = 0, std::size_t directions = 8);

/// Per-vertex firing frequency under edge redraws with A_t held fixed.
struct FireProbabilityEstimate {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::vector<VertexId> ids;           // vertices chosen at least once, sorted
  std::vector<std::uint32_t> counts;   // matching selection counts

  double frequency(VertexId v) const;
  std::vector<double> dense() const;
};

/// Each trial redraws every edge out of A_t with a fresh key, rescores the
/// candidates and runs select_cap. Trials run in parallel.
FireProbabilityEstimate estimate_fire_probability(const GraphModel& graph, std::span<const VertexId> active,
                                                  std::size_t k, std::size_t trials, std::uint64_t seed,
                                                  const ScoringOptions& options,
                                                  std::optional<std::span<const VertexId>> candidates = std::nullopt);

/// Largest fraction of the points inside a ball of the given radius centered
/// at one of the points.
double containment_fraction(const PointSet& points, double radius);
/// containment_fraction of A_t for every step of a trace.
std::vector<double> containment_fraction(const PointSet& positions, const RunTrace& trace, double radius);

}  // namespace kcap
