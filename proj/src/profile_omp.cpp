#include <cstdint>

#include "kcap/error.hpp"
#include "kcap/metrics.hpp"

namespace kcap {

namespace {

inline void profile_point(const PointSet& active, const Kernel& kernel, std::span<const double> x, double& e,
                          double& v) {
  e = 0.0;
  v = 0.0;
  for (std::size_t z = 0; z < active.size(); ++z) {
    const double g = kernel.probability(squared_distance(x, active[z]));
    e += g;
    v += g * (1.0 - g);
  }
}

void check(const PointSet& active, const PointSet& queries) {
  require(!active.empty(), "expected_input_profile: active set is empty");
  require(active.dim() == queries.dim(), "expected_input_profile: dimension mismatch");
}

}  // namespace

InputProfile expected_input_profile(const PointSet& active_positions, const Kernel& kernel,
                                    const PointSet& query_points) {
  check(active_positions, query_points);
  InputProfile out;
  out.expected.resize(query_points.size());
  out.variance.resize(query_points.size());
  const auto m = static_cast<std::int64_t>(query_points.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t q = 0; q < m; ++q)
    profile_point(active_positions, kernel, query_points[q], out.expected[q], out.variance[q]);
  return out;
}

InputProfile expected_input_profile_serial(const PointSet& active_positions, const Kernel& kernel,
                                           const PointSet& query_points) {
  check(active_positions, query_points);
  InputProfile out;
  out.expected.resize(query_points.size());
  out.variance.resize(query_points.size());
  for (std::size_t q = 0; q < query_points.size(); ++q)
    profile_point(active_positions, kernel, query_points[q], out.expected[q], out.variance[q]);
  return out;
}

}  // namespace kcap
