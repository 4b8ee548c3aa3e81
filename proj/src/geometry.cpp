#include "kcap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <numeric>

#include "kcap/error.hpp"
#include "kcap/rng.hpp"

namespace kcap {

PointSet::PointSet(std::size_t dim) : dim_(dim) { require(dim >= 1, "point dimension must be at least 1"); }

PointSet::PointSet(std::size_t dim, std::vector<double> flat) : dim_(dim), coords_(std::move(flat)) {
  require(dim >= 1, "point dimension must be at least 1");
  require(coords_.size() % dim == 0, "flat coordinate array length is not a multiple of the dimension");
}

PointSet PointSet::from_points(const std::vector<Point>& points) {
  require(!points.empty(), "cannot infer dimension from an empty point list");
  PointSet out(points.front().size());
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p);
  return out;
}

void PointSet::push_back(std::span<const double> p) {
  require(p.size() == dim_, "point dimension mismatch");
  coords_.insert(coords_.end(), p.begin(), p.end());
}

PointSet PointSet::subset(std::span<const std::uint32_t> ids) const {
  PointSet out(dim_);
  out.reserve(ids.size());
  for (auto id : ids) out.push_back((*this)[id]);
  return out;
}

double distance(std::span<const double> a, std::span<const double> b) noexcept {
  return std::sqrt(squared_distance(a, b));
}

Kernel::Kernel(Kind kind, double scale) : kind_(kind), scale_(scale) {
  if (kind == Kind::gaussian) neg_half_inv_var_ = -0.5 / (scale * scale);
}

Kernel Kernel::gaussian(double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), "gaussian kernel needs sigma > 0");
  return Kernel(Kind::gaussian, sigma);
}

Kernel Kernel::inverse_square(double c) {
  require(c > 0.0 && std::isfinite(c), "inverse-square kernel needs c > 0");
  return Kernel(Kind::inverse_square, c);
}

double Kernel::profile(double r) const noexcept {
  if (kind_ == Kind::gaussian) return std::exp(r * r * neg_half_inv_var_);
  return 1.0 / (scale_ + r * r);
}

double Kernel::derivative(double r) const noexcept {
  if (kind_ == Kind::gaussian) return -r / (scale_ * scale_) * std::exp(r * r * neg_half_inv_var_);
  const double q = scale_ + r * r;
  return -2.0 * r / (q * q);
}

double Kernel::radius_below(double p) const {
  require(p > 0.0 && p < 1.0, "probability level must lie in (0,1)");
  if (kind_ == Kind::gaussian) return scale_ * std::sqrt(2.0 * std::log(1.0 / p));
  return std::sqrt(std::max(0.0, 1.0 / p - scale_));
}

double kernel_eval(const Kernel& kernel, std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "kernel_eval: dimension mismatch");
  return kernel.probability(squared_distance(x, y));
}

bool Ball::contains(std::span<const double> p, double tolerance) const {
  return distance(center, p) <= radius + tolerance;
}

namespace {

// Move-to-front smallest enclosing ball. Boundary sets are solved as the
// circumcenter within their affine hull.
class MiniballSolver {
 public:
  explicit MiniballSolver(const PointSet& pts) : pts_(pts), dim_(pts.dim()) {
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Fixed-seed shuffle: expected linear time, deterministic output.
    Stream stream(0x5eb0a11ULL);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[stream.bounded(i)]);
    points_.assign(order.begin(), order.end());
  }

  Ball solve() {
    center_.assign(dim_, 0.0);
    radius2_ = -1.0;
    move_to_front(points_.end());
    Ball ball{center_, 0.0};
    double r2 = 0.0;
    for (std::size_t i = 0; i < pts_.size(); ++i) r2 = std::max(r2, squared_distance(center_, pts_[i]));
    ball.radius = std::sqrt(r2);
    return ball;
  }

 private:
  using Iter = std::list<std::size_t>::iterator;

  bool outside(std::span<const double> p) const {
    if (radius2_ < 0.0) return true;
    const double d2 = squared_distance(center_, p);
    return d2 > radius2_ * (1.0 + 1e-13) + 1e-30;
  }

  void move_to_front(Iter end) {
    set_boundary_ball();
    if (boundary_.size() == dim_ + 1) return;
    for (Iter it = points_.begin(); it != end;) {
      Iter current = it++;
      if (outside(pts_[*current])) {
        boundary_.push_back(*current);
        move_to_front(current);
        boundary_.pop_back();
        if (current != points_.begin()) points_.splice(points_.begin(), points_, current);
      }
    }
  }

  // Smallest ball with every boundary point on its surface.
  void set_boundary_ball() {
    const std::size_t m = boundary_.size();
    if (m == 0) {
      radius2_ = -1.0;
      return;
    }
    auto q0 = pts_[boundary_[0]];
    if (m == 1) {
      center_.assign(q0.begin(), q0.end());
      radius2_ = 0.0;
      return;
    }
    const std::size_t r = m - 1;
    std::vector<std::vector<double>> v(r, std::vector<double>(dim_));
    for (std::size_t j = 0; j < r; ++j) {
      auto q = pts_[boundary_[j + 1]];
      for (std::size_t i = 0; i < dim_; ++i) v[j][i] = q[i] - q0[i];
    }
    // Gram system: (v_a . v_b) lambda_b = |v_a|^2 / 2
    std::vector<std::vector<double>> a(r, std::vector<double>(r + 1));
    double scale = 0.0;
    for (std::size_t x = 0; x < r; ++x) {
      for (std::size_t y = 0; y < r; ++y) {
        double dot = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) dot += v[x][i] * v[y][i];
        a[x][y] = dot;
      }
      a[x][r] = 0.5 * a[x][x];
      scale = std::max(scale, a[x][x]);
    }
    std::vector<double> lambda(r, 0.0);
    if (!gauss_solve(a, lambda, scale)) {
      // Affinely dependent boundary: keep the previous ball and grow it.
      const auto p = pts_[boundary_.back()];
      radius2_ = std::max(radius2_, squared_distance(center_, p));
      return;
    }
    center_.assign(q0.begin(), q0.end());
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t i = 0; i < dim_; ++i) center_[i] += lambda[j] * v[j][i];
    radius2_ = 0.0;
    for (auto id : boundary_) radius2_ = std::max(radius2_, squared_distance(center_, pts_[id]));
  }

  static bool gauss_solve(std::vector<std::vector<double>>& a, std::vector<double>& x, double scale) {
    const std::size_t r = x.size();
    for (std::size_t col = 0; col < r; ++col) {
      std::size_t pivot = col;
      for (std::size_t row = col + 1; row < r; ++row)
        if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
      if (std::abs(a[pivot][col]) <= 1e-14 * scale) return false;
      std::swap(a[col], a[pivot]);
      for (std::size_t row = col + 1; row < r; ++row) {
        const double f = a[row][col] / a[col][col];
        for (std::size_t c = col; c <= r; ++c) a[row][c] -= f * a[col][c];
      }
    }
    for (std::size_t i = r; i-- > 0;) {
      double s = a[i][r];
      for (std::size_t c = i + 1; c < r; ++c) s -= a[i][c] * x[c];
      x[i] = s / a[i][i];
    }
    return true;
  }

  const PointSet& pts_;
  std::size_t dim_;
  std::list<std::size_t> points_;
  std::vector<std::size_t> boundary_;
  std::vector<double> center_;
  double radius2_ = -1.0;
};

}  // namespace

Ball enclosing_ball(const PointSet& points) {
  require(!points.empty(), "enclosing_ball: empty point list");
  if (points.dim() == 1) {
    double lo = points[0][0], hi = lo;
    for (std::size_t i = 1; i < points.size(); ++i) {
      lo = std::min(lo, points[i][0]);
      hi = std::max(hi, points[i][0]);
    }
    return Ball{{0.5 * (lo + hi)}, 0.5 * (hi - lo)};
  }
  return MiniballSolver(points).solve();
}

Ball enclosing_ball(const std::vector<Point>& points) {
  require(!points.empty(), "enclosing_ball: empty point list");
  return enclosing_ball(PointSet::from_points(points));
}

}  // namespace kcap
