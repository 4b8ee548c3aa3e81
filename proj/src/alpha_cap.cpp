#include "kcap/alpha_cap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <numbers>

#include "kcap/error.hpp"
#include "kcap/rng.hpp"

namespace kcap {

namespace {

constexpr double kRootTolerance = 1e-12;
constexpr double kMeasureTolerance = 1e-8;
constexpr int kMaxLevelIterations = 200;

double kernel_length_scale(const Kernel& kernel) {
  return kernel.kind() == Kernel::Kind::gaussian ? kernel.scale() : std::sqrt(kernel.scale());
}

// Superlevel-set extraction for a fixed level.
class LevelScanner {
 public:
  LevelScanner(const IntervalUnion& set, const Kernel& kernel, double spacing)
      : set_(set), kernel_(kernel) {
    const auto cells = static_cast<std::size_t>(std::ceil(1.0 / spacing));
    xs_.resize(cells + 1);
    fs_.resize(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) {
      xs_[i] = std::min(1.0, static_cast<double>(i) / static_cast<double>(cells));
      fs_[i] = f_eval(set, kernel, xs_[i]);
    }
  }

  double min_value() const { return *std::min_element(fs_.begin(), fs_.end()); }
  double max_value() const { return *std::max_element(fs_.begin(), fs_.end()); }

  std::vector<Interval> superlevel(double level) const {
    std::vector<Interval> out;
    const std::size_t m = xs_.size();
    std::size_t i = 0;
    while (i < m) {
      if (fs_[i] < level) {
        ++i;
        continue;
      }
      const double lo = i == 0 ? 0.0 : crossing(xs_[i - 1], xs_[i], level, false);
      std::size_t j = i;
      while (j + 1 < m && fs_[j + 1] >= level) ++j;
      const double hi = j + 1 == m ? 1.0 : crossing(xs_[j], xs_[j + 1], level, true);
      if (hi > lo) out.push_back({lo, hi});
      i = j + 1;
    }
    return out;
  }

 private:
  // Root of F - level in [a,b]; `descending` when F(a) >= level > F(b).
  double crossing(double a, double b, double level, bool descending) const {
    while (b - a > kRootTolerance) {
      const double mid = 0.5 * (a + b);
      const bool above = f_eval(set_, kernel_, mid) >= level;
      if (above == descending)
        a = mid;
      else
        b = mid;
    }
    return 0.5 * (a + b);
  }

  const IntervalUnion& set_;
  const Kernel& kernel_;
  std::vector<double> xs_;
  std::vector<double> fs_;
};

double total_measure(const std::vector<Interval>& intervals) {
  double m = 0.0;
  for (const auto& iv : intervals) m += iv.width();
  return m;
}

}  // namespace

IntervalUnion IntervalUnion::normalize(std::vector<Interval> intervals) {
  require(!intervals.empty(), "normalize: empty interval list");
  for (const auto& iv : intervals) {
    require(iv.lo < iv.hi, "normalize: interval endpoints must satisfy a < b");
    require(iv.lo >= 0.0 && iv.hi <= 1.0, "normalize: interval outside [0,1]");
  }
  std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  IntervalUnion out;
  for (const auto& iv : intervals) {
    if (!out.intervals_.empty() && iv.lo <= out.intervals_.back().hi)
      out.intervals_.back().hi = std::max(out.intervals_.back().hi, iv.hi);
    else
      out.intervals_.push_back(iv);
  }
  require(out.measure() > 0.0, "normalize: zero total measure");
  return out;
}

double IntervalUnion::measure() const noexcept { return total_measure(intervals_); }

double IntervalUnion::potential() const noexcept {
  if (intervals_.empty()) return 0.0;
  return intervals_.back().midpoint() - intervals_.front().midpoint();
}

bool IntervalUnion::contains(double x) const noexcept {
  return std::any_of(intervals_.begin(), intervals_.end(), [x](const Interval& iv) { return iv.lo <= x && x <= iv.hi; });
}

namespace {

double distance_to(const IntervalUnion& set, double x) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& iv : set.intervals()) {
    if (x >= iv.lo && x <= iv.hi) return 0.0;
    best = std::min(best, x < iv.lo ? iv.lo - x : x - iv.hi);
  }
  return best;
}

// sup over x in a of dist(x, b): attained at an endpoint of a or at the
// middle of a gap of b.
double directed_hausdorff(const IntervalUnion& a, const IntervalUnion& b) {
  std::vector<double> probes;
  for (const auto& iv : a.intervals()) {
    probes.push_back(iv.lo);
    probes.push_back(iv.hi);
  }
  const auto& bi = b.intervals();
  for (std::size_t j = 0; j + 1 < bi.size(); ++j) {
    const double mid = 0.5 * (bi[j].hi + bi[j + 1].lo);
    if (a.contains(mid)) probes.push_back(mid);
  }
  double worst = 0.0;
  for (double x : probes) worst = std::max(worst, distance_to(b, x));
  return worst;
}

}  // namespace

double hausdorff_distance(const IntervalUnion& a, const IntervalUnion& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double f_eval(const IntervalUnion& set, const Kernel& kernel, double x) {
  require(x >= 0.0 && x <= 1.0, "f_eval: x outside [0,1]");
  double sum = 0.0;
  if (kernel.kind() == Kernel::Kind::gaussian) {
    const double s = kernel.scale();
    const double inv = 1.0 / (s * std::numbers::sqrt2);
    for (const auto& iv : set.intervals()) sum += std::erf((iv.hi - x) * inv) - std::erf((iv.lo - x) * inv);
    return sum * s * std::sqrt(std::numbers::pi / 2.0);
  }
  const double rc = std::sqrt(kernel.scale());
  for (const auto& iv : set.intervals()) sum += std::atan((iv.hi - x) / rc) - std::atan((iv.lo - x) / rc);
  return sum / rc;
}

LevelSet threshold_solve(const IntervalUnion& set, const Kernel& kernel, double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, "threshold_solve: alpha must lie in (0,1]");
  require(std::abs(alpha - set.measure()) <= 1e-6, "threshold_solve: alpha must equal the measure of the set");
  const double spacing = std::min(kernel_length_scale(kernel), alpha) / 64.0;
  const LevelScanner scan(set, kernel, spacing);

  double lo = scan.min_value();  // measure(lo) ~ 1 >= alpha
  double hi = scan.max_value();  // measure(hi) ~ 0 <= alpha
  auto best_level = lo;
  auto best = scan.superlevel(lo);
  double best_error = std::abs(total_measure(best) - alpha);
  for (int it = 0; it < kMaxLevelIterations && best_error > 1e-11; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    auto candidate = scan.superlevel(mid);
    const double m = total_measure(candidate);
    if (std::abs(m - alpha) < best_error) {
      best_error = std::abs(m - alpha);
      best = candidate;
      best_level = mid;
    }
    if (m >= alpha)
      lo = mid;
    else
      hi = mid;
  }
  if (best_error > kMeasureTolerance || best.empty())
    throw DegenerateLevelError("threshold_solve: no level attains measure alpha (plateau in F); error " +
                               std::to_string(best_error));
  return {best_level, IntervalUnion::normalize(std::move(best))};
}

IntervalUnion alpha_step(const IntervalUnion& set, const Kernel& kernel, double alpha) {
  return threshold_solve(set, kernel, alpha).next;
}

ContinuousTrace run_continuous(const IntervalUnion& initial, const Kernel& kernel, std::size_t max_steps) {
  require(max_steps >= 1, "run_continuous: max_steps must be at least 1");
  const double alpha = initial.measure();
  ContinuousTrace trace;
  trace.steps.push_back({0, initial, std::nullopt, initial.potential()});
  for (std::size_t t = 0; t < max_steps; ++t) {
    auto& current = trace.steps.back();
    auto level = threshold_solve(current.set, kernel, alpha);
    current.threshold = level.threshold;
    if (current.set.size() == 1 && level.next.size() == 1) {
      const auto& a = current.set.intervals().front();
      const auto& b = level.next.intervals().front();
      if (std::max(std::abs(a.lo - b.lo), std::abs(a.hi - b.hi)) < 1e-8) {
        trace.converged_step = current.t;
        break;
      }
    }
    const double potential = level.next.potential();
    trace.steps.push_back({t + 1, std::move(level.next), std::nullopt, potential});
  }
  return trace;
}

IntervalUnion random_interval_union(std::size_t count, double alpha, std::uint64_t seed) {
  require(count >= 1, "random_interval_union: count must be at least 1");
  require(alpha > 0.0 && alpha <= 1.0, "random_interval_union: alpha must lie in (0,1]");
  Stream stream(seed);
  // Widths and gaps come from sorted uniform cut points.
  auto split = [&](std::size_t parts, double total) {
    std::vector<double> cuts(parts - 1);
    for (auto& c : cuts) c = stream.uniform();
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> out(parts);
    double prev = 0.0;
    for (std::size_t i = 0; i + 1 < parts; ++i) {
      out[i] = (cuts[i] - prev) * total;
      prev = cuts[i];
    }
    out.back() = (1.0 - prev) * total;
    return out;
  };
  const auto widths = split(count, alpha);
  const auto gaps = split(count + 1, 1.0 - alpha);
  std::vector<Interval> intervals;
  double x = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    x += gaps[i];
    if (widths[i] > 0.0) intervals.push_back({x, std::min(1.0, x + widths[i])});
    x += widths[i];
  }
  return IntervalUnion::normalize(std::move(intervals));
}

double convergence_bound(const Kernel& kernel, double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, "convergence_bound: alpha must lie in (0,1]");
  // |g'| is unimodal on [0, inf) for both kernels, peaking at `peak`.
  const double peak = kernel.kind() == Kernel::Kind::gaussian ? kernel.scale() : std::sqrt(kernel.scale() / 3.0);
  const double max_slope = std::abs(kernel.derivative(std::min(peak, 1.0)));
  const double min_slope = std::min(std::abs(kernel.derivative(alpha / 8.0)), std::abs(kernel.derivative(1.0)));
  return max_slope / min_slope;
}

}  // namespace kcap
