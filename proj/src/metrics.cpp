#include "kcap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "kcap/error.hpp"

namespace kcap {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<ClusterSummary> cluster_active_set(const PointSet& positions, std::span<const VertexId> active,
                                               double separation) {
  require(separation > 0.0, "cluster_active_set: separation must be positive");
  std::vector<VertexId> ids(active.begin(), active.end());
  std::sort(ids.begin(), ids.end());
  for (auto v : ids) require(v < positions.size(), "cluster_active_set: id out of range");
  if (ids.empty()) return {};

  const PointSet pts = positions.subset(ids);
  const double min_cell = std::pow(2.0, -60.0 / static_cast<double>(pts.dim()));
  const GridIndex grid(pts, std::max(separation, min_cell));
  const double sep2 = separation * separation;
  DisjointSets sets(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    grid.visit(pts[i], separation, [&](std::span<const std::uint32_t> slots) {
      for (auto j : slots)
        if (j > i && squared_distance(pts[i], pts[j]) < sep2) sets.unite(i, j);
    });
  }

  // Roots are the smallest slot of each component, so map order = smallest id order.
  std::map<std::size_t, std::vector<std::uint32_t>> groups;
  for (std::size_t i = 0; i < ids.size(); ++i) groups[sets.find(i)].push_back(static_cast<std::uint32_t>(i));

  std::vector<ClusterSummary> out;
  out.reserve(groups.size());
  for (auto& [root, slots] : groups) {
    ClusterSummary c;
    for (auto s : slots) c.members.push_back(ids[s]);
    c.ball = enclosing_ball(pts.subset(slots));
    out.push_back(std::move(c));
  }
  return out;
}

GradientCheck gradient_bound_check(const PointSet& active_positions, double sigma, const PointSet& sample_points,
                                   double h, std::uint64_t seed, std::size_t directions) {
  require(!active_positions.empty(), "gradient_bound_check: active set is empty");
  require(active_positions.dim() == sample_points.dim(), "gradient_bound_check: dimension mismatch");
  const std::size_t d = active_positions.dim();
  if (h <= 0.0) h = sigma * 1e-4;
  const Kernel kernel = Kernel::gaussian(sigma);
  const auto k = static_cast<double>(active_positions.size());

  GradientCheck result;
  result.bound = k / sigma * std::sqrt(static_cast<double>(d) / std::exp(1.0));

  auto expected = [&](std::span<const double> x) {
    double e = 0.0;
    for (std::size_t z = 0; z < active_positions.size(); ++z)
      e += kernel.probability(squared_distance(x, active_positions[z]));
    return e;
  };

  Stream stream(derive_seed(seed, 0, 0x9d));
  std::vector<double> v(d), plus(d), minus(d);
  for (std::size_t s = 0; s < sample_points.size(); ++s) {
    const auto x = sample_points[s];
    for (std::size_t dir = 0; dir < d + directions; ++dir) {
      if (dir < d) {
        std::fill(v.begin(), v.end(), 0.0);
        v[dir] = 1.0;
      } else {
        double norm = 0.0;
        do {
          norm = 0.0;
          for (auto& c : v) {
            c = 2.0 * stream.uniform() - 1.0;
            norm += c * c;
          }
        } while (norm > 1.0 || norm < 1e-12);
        for (auto& c : v) c /= std::sqrt(norm);
      }
      for (std::size_t i = 0; i < d; ++i) {
        plus[i] = x[i] + h * v[i];
        minus[i] = x[i] - h * v[i];
      }
      const double derivative = std::abs(expected(plus) - expected(minus)) / (2.0 * h);
      result.max_derivative = std::max(result.max_derivative, derivative);
    }
  }
  result.max_ratio = result.max_derivative / result.bound;
  return result;
}

double FireProbabilityEstimate::frequency(VertexId v) const {
  auto it = std::lower_bound(ids.begin(), ids.end(), v);
  if (it == ids.end() || *it != v) return 0.0;
  return static_cast<double>(counts[static_cast<std::size_t>(it - ids.begin())]) / static_cast<double>(trials);
}

std::vector<double> FireProbabilityEstimate::dense() const {
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < ids.size(); ++i)
    out[ids[i]] = static_cast<double>(counts[i]) / static_cast<double>(trials);
  return out;
}

FireProbabilityEstimate estimate_fire_probability(const GraphModel& graph, std::span<const VertexId> active,
                                                  std::size_t k, std::size_t trials, std::uint64_t seed,
                                                  const ScoringOptions& options,
                                                  std::optional<std::span<const VertexId>> candidates) {
  require(trials >= 1, "estimate_fire_probability: trials must be at least 1");
  require(k >= 1 && k <= graph.size(), "estimate_fire_probability: k must lie in [1, n]");
  std::vector<VertexId> pool = candidates ? std::vector<VertexId>(candidates->begin(), candidates->end())
                                          : candidate_vertices(graph, active, options);
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  std::vector<std::vector<VertexId>> winners(trials);
  const auto count = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t trial = 0; trial < count; ++trial) {
    const auto t = static_cast<std::uint64_t>(trial);
    const EdgeKey key(derive_seed(seed, t, 1));
    const auto input = synaptic_input_serial(graph, active, options, key, std::span<const VertexId>(pool));
    Stream ties(derive_seed(seed, t, 2));
    winners[trial] = select_cap(input, k, ties).next.members;
  }

  std::map<VertexId, std::uint32_t> tally;
  for (const auto& w : winners)
    for (auto v : w) ++tally[v];
  FireProbabilityEstimate est;
  est.n = graph.size();
  est.trials = trials;
  for (auto [v, c] : tally) {
    est.ids.push_back(v);
    est.counts.push_back(c);
  }
  return est;
}

double containment_fraction(const PointSet& points, double radius) {
  require(!points.empty(), "containment_fraction: empty point set");
  require(radius >= 0.0, "containment_fraction: radius must be nonnegative");
  const double r2 = radius * radius;
  std::size_t best = 0;
  for (std::size_t c = 0; c < points.size(); ++c) {
    std::size_t inside = 0;
    for (std::size_t i = 0; i < points.size(); ++i) inside += squared_distance(points[c], points[i]) <= r2;
    best = std::max(best, inside);
  }
  return static_cast<double>(best) / static_cast<double>(points.size());
}

std::vector<double> containment_fraction(const PointSet& positions, const RunTrace& trace, double radius) {
  require(!trace.steps.empty(), "containment_fraction: empty trace");
  std::vector<double> out;
  out.reserve(trace.steps.size());
  for (const auto& step : trace.steps) {
    require(!step.members.empty(), "containment_fraction: trace was recorded without members");
    out.push_back(containment_fraction(positions.subset(step.members), radius));
  }
  return out;
}

}  // namespace kcap
