#pragma once

// Continuous 1-D alpha-cap process: A_t is a finite union of intervals in
// [0,1], F_t(x) = integral of g(y - x) over A_t, and A_{t+1} is the superlevel
// set {F_t >= C_t} with the same measure as A_t.

#include <cstdint>
#include <optional>
#include <vector>

#include "kcap/geometry.hpp"

namespace kcap {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  double midpoint() const noexcept { return 0.5 * (lo + hi); }
};

/// Sorted, disjoint, non-touching intervals in [0,1] with positive measure.
class IntervalUnion {
 public:
  /// Sorts and merges overlapping or touching intervals.
  static IntervalUnion normalize(std::vector<Interval> intervals);

  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  std::size_t size() const noexcept { return intervals_.size(); }
  double measure() const noexcept;
  /// Distance between the midpoints of the outermost intervals.
  double potential() const noexcept;
  bool contains(double x) const noexcept;

 private:
  std::vector<Interval> intervals_;
};

double hausdorff_distance(const IntervalUnion& a, const IntervalUnion& b);

/// Closed-form F(x) for the Gaussian and inverse-square kernels.
double f_eval(const IntervalUnion& set, const Kernel& kernel, double x);

struct LevelSet {
  double threshold = 0.0;
  IntervalUnion next;
};

/// Finds C with |{F >= C}| = alpha. F is scanned on a grid of spacing
/// min(scale, alpha)/64; sign changes of F - C are refined by bisection and
/// C itself is bisected between min F and max F.
LevelSet threshold_solve(const IntervalUnion& set, const Kernel& kernel, double alpha);

IntervalUnion alpha_step(const IntervalUnion& set, const Kernel& kernel, double alpha);

struct ContinuousStep {
  std::size_t t = 0;
  IntervalUnion set;
  std::optional<double> threshold;
  double potential = 0.0;
};

struct ContinuousTrace {
  std::vector<ContinuousStep> steps;
  /// First step at which A_t is a single interval that the next step leaves
  /// in place to within 1e-8.
  std::optional<std::size_t> converged_step;
};

ContinuousTrace run_continuous(const IntervalUnion& initial, const Kernel& kernel, std::size_t max_steps);

/// `count` intervals of total measure alpha at random positions in [0,1].
/// Neighbours may touch, in which case they merge.
IntervalUnion random_interval_union(std::size_t count, double alpha, std::uint64_t seed);

/// max_{[0,1]} |g'| / min_{[alpha/8, 1]} |g'|.
double convergence_bound(const Kernel& kernel, double alpha);

}  // namespace kcap
