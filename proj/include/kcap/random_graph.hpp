#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "kcap/geometry.hpp"
#include "kcap/rng.hpp"

namespace kcap {

using VertexId = std::uint32_t;

/// n i.i.d. uniform points in [0,1]^d. Coordinate i of vertex v is a pure
/// function of (seed, v, i).
PointSet sample_vertices(std::size_t n, std::size_t d, std::uint64_t seed);

/// Which realization of the edge set to query. The graph's own key is derived
/// from its graph seed; Monte Carlo redraws use fresh keys.
class EdgeKey {
 public:
  explicit EdgeKey(std::uint64_t seed) : hash_(seed) {}
  double uniform(VertexId source, VertexId target) const noexcept { return hash_.uniform(source, target); }
  std::uint64_t row(VertexId source) const noexcept { return hash_.row(source); }
  static double uniform_from_row(std::uint64_t row, VertexId target) noexcept {
    return to_unit(PairHash::finish(row, target));
  }

 private:
  PairHash hash_;
};

/// Soft geometric random graph: vertex positions are stored, the directed
/// edge (s,t) is present iff u(seed,s,t) < g(x_s, x_t). The adjacency is
/// never materialized.
class GraphModel {
 public:
  /// Samples n uniform vertices. The spatial index uses `index_cell`
  /// (defaults to the kernel scale).
  GraphModel(std::size_t n, std::size_t d, Kernel kernel, std::uint64_t graph_seed, double index_cell = 0.0);
  /// Graph over explicit positions (fixtures, replay).
  GraphModel(PointSet positions, Kernel kernel, std::uint64_t graph_seed, double index_cell = 0.0);

  std::size_t size() const noexcept { return positions_.size(); }
  std::size_t dim() const noexcept { return positions_.dim(); }
  const Kernel& kernel() const noexcept { return kernel_; }
  std::uint64_t graph_seed() const noexcept { return graph_seed_; }
  const PointSet& positions() const noexcept { return positions_; }
  std::span<const double> position(VertexId v) const noexcept { return positions_[v]; }
  const GridIndex& index() const noexcept { return index_; }
  const EdgeKey& edge_key() const noexcept { return edge_key_; }

  /// Edge (source -> target) in the graph's own realization.
  bool edge_present(VertexId source, VertexId target) const;

  /// Edge test without range checks, under an arbitrary realization.
  bool edge_present(const EdgeKey& key, VertexId source, VertexId target) const noexcept {
    const double u = key.uniform(source, target);
    return kernel_.accepts(u, squared_distance(positions_[source], positions_[target]));
  }

 private:
  PointSet positions_;
  Kernel kernel_;
  std::uint64_t graph_seed_;
  EdgeKey edge_key_;
  GridIndex index_;
};

/// Number of active vertices with an edge into `target`. With a cutoff, pairs
/// farther apart than the cutoff are treated as absent.
std::size_t in_degree_from(const GraphModel& graph, VertexId target, std::span<const VertexId> active,
                           std::optional<double> cutoff = std::nullopt);

/// Cutoff radius beyond which the expected number of dropped edges per step,
/// over all n*k candidate pairs, is at most epsilon.
double truncation_radius(const Kernel& kernel, std::size_t n, std::size_t k, double epsilon);

/// Positions export: {"n","d","sigma","graph_seed","kernel","coords":[...]}
void save_positions_json(const GraphModel& graph, const std::string& path);
GraphModel load_positions_json(const std::string& path, double index_cell = 0.0);

}  // namespace kcap
