#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace kcap {

/// A position in the unit hypercube.
using Point = std::vector<double>;

/// Flat, row-major storage for many points of one dimension.
class PointSet {
 public:
  explicit PointSet(std::size_t dim = 1);
  PointSet(std::size_t dim, std::vector<double> flat);
  static PointSet from_points(const std::vector<Point>& points);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }
  void push_back(std::span<const double> p);
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }

  const std::vector<double>& flat() const noexcept { return coords_; }

  /// Copy of the points with the given ids, in the given order.
  PointSet subset(std::span<const std::uint32_t> ids) const;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}
double distance(std::span<const double> a, std::span<const double> b) noexcept;

/// Edge-probability / influence kernel as a function of distance.
///   gaussian:       g(r) = exp(-r^2 / (2 sigma^2))
///   inverse_square: g(r) = 1 / (c + r^2), clamped to 1 when used as a probability
class Kernel {
 public:
  enum class Kind { gaussian, inverse_square };

  static Kernel gaussian(double sigma);
  static Kernel inverse_square(double c);

  Kind kind() const noexcept { return kind_; }
  /// sigma for the Gaussian, c for the inverse-square kernel.
  double scale() const noexcept { return scale_; }

  /// Probability value at squared distance r2, always in (0,1].
  double probability(double r2) const noexcept {
    if (kind_ == Kind::gaussian) return std::exp(r2 * neg_half_inv_var_);
    const double v = 1.0 / (scale_ + r2);
    return v < 1.0 ? v : 1.0;
  }

  /// u < probability(r2), deciding most far pairs without an exp: for z > 1/2
  /// the bound exp(-z) < 1/(1 + z + z^2/2) leaves a margin far above rounding.
  bool accepts(double u, double r2) const noexcept {
    if (kind_ == Kind::gaussian) {
      const double z = -r2 * neg_half_inv_var_;
      if (z > 0.5 && u * (1.0 + z * (1.0 + 0.5 * z)) >= 1.0) return false;
    }
    return u < probability(r2);
  }

  /// Unclamped profile g(r) used by the continuous process.
  double profile(double r) const noexcept;
  /// g'(r), unclamped.
  double derivative(double r) const noexcept;

  /// Distance beyond which the probability drops below p (0 < p < 1).
  double radius_below(double p) const;

 private:
  Kernel(Kind kind, double scale);
  Kind kind_;
  double scale_;
  double neg_half_inv_var_ = 0.0;
};

/// kernel_eval: probability that a directed edge x->y exists.
double kernel_eval(const Kernel& kernel, std::span<const double> x, std::span<const double> y);

struct Ball {
  Point center;
  double radius = 0.0;

  bool contains(std::span<const double> p, double tolerance = 1e-12) const;
};

/// Smallest enclosing ball. Exact move-to-front algorithm in any dimension.
Ball enclosing_ball(const PointSet& points);
Ball enclosing_ball(const std::vector<Point>& points);

/// Uniform grid over [0,1]^d. Bucket of a point is floor(coords / cell_size).
class GridIndex {
 public:
  GridIndex() = default;
  GridIndex(const PointSet& points, double cell_size);

  double cell_size() const noexcept { return cell_size_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t point_count() const noexcept { return ids_.size(); }
  std::size_t cells_per_axis() const noexcept { return per_axis_; }

  /// Ids in the bucket with the given integer cell coordinates.
  std::span<const std::uint32_t> bucket(std::span<const std::int64_t> cell) const;
  std::vector<std::int64_t> cell_of(std::span<const double> p) const;
  /// Number of non-empty buckets.
  std::size_t bucket_count() const;

  /// Superset of the indexed points within `radius` of `center`. Every
  /// returned point lies within radius + cell_size * sqrt(d).
  std::vector<std::uint32_t> query(std::span<const double> center, double radius) const;

  /// Linear keys of cells that intersect the ball.
  void cells_near(std::span<const double> center, double radius, std::vector<std::uint64_t>& keys) const {
    for_each_cell(center, radius, [&](std::uint64_t key) { keys.push_back(key); });
  }
  std::span<const std::uint32_t> bucket_by_key(std::uint64_t key) const;

  /// Calls visit(span of ids) for every non-empty bucket intersecting the ball.
  template <class Visit>
  void visit(std::span<const double> center, double radius, Visit&& visit) const {
    for_each_cell(center, radius, [&](std::uint64_t key) {
      auto ids = bucket_by_key(key);
      if (!ids.empty()) visit(ids);
    });
  }

  static constexpr std::size_t max_dim = 16;

  /// Calls fn(key) for every cell whose box is within `radius` of `center`.
  template <class Fn>
  void for_each_cell(std::span<const double> center, double radius, Fn&& fn) const {
    std::array<std::int64_t, max_dim> lo{}, hi{}, cur{};
    const auto last = static_cast<std::int64_t>(per_axis_) - 1;
    for (std::size_t i = 0; i < dim_; ++i) {
      lo[i] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((center[i] - radius) / cell_size_)));
      hi[i] = std::min<std::int64_t>(last, static_cast<std::int64_t>(std::floor((center[i] + radius) / cell_size_)));
      if (lo[i] > hi[i]) return;
      cur[i] = lo[i];
    }
    const double r2 = radius * radius;
    if (!dense_) {
      // A sparse grid can have far more cells in the box than occupied
      // buckets; then walking the occupied keys is cheaper. Both paths
      // visit keys in ascending order.
      long double box = 1.0L;
      for (std::size_t i = 0; i < dim_; ++i) box *= static_cast<long double>(hi[i] - lo[i] + 1);
      if (box > static_cast<long double>(keys_.size())) {
        for (auto key : keys_) {
          std::uint64_t rest = key;
          bool inside = true;
          for (std::size_t i = dim_; i-- > 0;) {
            cur[i] = static_cast<std::int64_t>(rest % per_axis_);
            rest /= per_axis_;
            inside = inside && cur[i] >= lo[i] && cur[i] <= hi[i];
          }
          if (inside && box_gap2(center, cur) <= r2) fn(key);
        }
        return;
      }
    }
    while (true) {
      std::uint64_t key = 0;
      for (std::size_t i = 0; i < dim_; ++i) key = key * per_axis_ + static_cast<std::uint64_t>(cur[i]);
      if (box_gap2(center, cur) <= r2) fn(key);
      std::size_t axis = dim_;
      while (axis > 0) {
        --axis;
        if (cur[axis] < hi[axis]) {
          ++cur[axis];
          break;
        }
        cur[axis] = lo[axis];
        if (axis == 0) return;
      }
    }
  }

 private:
  std::uint64_t key_of(std::span<const std::int64_t> cell) const;

  // Squared distance from center to the box of a cell.
  double box_gap2(std::span<const double> center, const std::array<std::int64_t, max_dim>& cell) const noexcept {
    double gap2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      const double a = static_cast<double>(cell[i]) * cell_size_;
      const double b = a + cell_size_;
      const double g = center[i] < a ? a - center[i] : (center[i] > b ? center[i] - b : 0.0);
      gap2 += g * g;
    }
    return gap2;
  }

  std::size_t dim_ = 1;
  double cell_size_ = 1.0;
  std::size_t per_axis_ = 1;
  bool dense_ = true;
  std::vector<std::uint32_t> ids_;
  // dense: offsets_[key]..offsets_[key+1]; sparse: keys_[j] owns offsets_[j]..offsets_[j+1]
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint64_t> keys_;
};

}  // namespace kcap
