#include <algorithm>
#include <cmath>
#include <limits>

#include "kcap/error.hpp"
#include "kcap/geometry.hpp"

namespace kcap {

namespace {
constexpr std::uint64_t kDenseCellLimit = std::uint64_t{1} << 20;
}

GridIndex::GridIndex(const PointSet& points, double cell_size) : dim_(points.dim()), cell_size_(cell_size) {
  require(cell_size > 0.0 && std::isfinite(cell_size), "grid_build: cell_size must be positive");
  require(dim_ <= max_dim, "grid_build: dimension too large");
  require(points.size() < std::numeric_limits<std::uint32_t>::max(), "grid_build: too many points");
  per_axis_ = static_cast<std::size_t>(std::floor(1.0 / cell_size)) + 1;

  // Total cell count must fit a 64-bit key.
  long double total = 1.0L;
  for (std::size_t i = 0; i < dim_; ++i) total *= static_cast<long double>(per_axis_);
  require(total < 9.0e18L, "grid_build: cell_size too small for this dimension");
  const auto cells = static_cast<std::uint64_t>(total);

  const std::size_t n = points.size();
  std::vector<std::uint64_t> point_keys(n);
  std::vector<std::int64_t> cell(dim_);
  for (std::size_t p = 0; p < n; ++p) {
    auto x = points[p];
    for (std::size_t i = 0; i < dim_; ++i) {
      require(x[i] >= 0.0 && x[i] <= 1.0, "grid_build: point outside the unit cube");
      cell[i] = static_cast<std::int64_t>(std::floor(x[i] / cell_size));
    }
    point_keys[p] = key_of(cell);
  }

  ids_.resize(n);
  dense_ = cells <= std::max<std::uint64_t>(kDenseCellLimit, 2 * static_cast<std::uint64_t>(n));
  if (dense_) {
    // Counting sort keeps ids ascending inside each bucket.
    offsets_.assign(cells + 1, 0);
    for (auto key : point_keys) ++offsets_[key + 1];
    for (std::uint64_t c = 0; c < cells; ++c) offsets_[c + 1] += offsets_[c];
    std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t p = 0; p < n; ++p) ids_[fill[point_keys[p]]++] = static_cast<std::uint32_t>(p);
  } else {
    std::vector<std::uint32_t> order(n);
    for (std::size_t p = 0; p < n; ++p) order[p] = static_cast<std::uint32_t>(p);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return point_keys[a] < point_keys[b]; });
    for (std::size_t j = 0; j < n; ++j) {
      ids_[j] = order[j];
      const auto key = point_keys[order[j]];
      if (keys_.empty() || keys_.back() != key) {
        keys_.push_back(key);
        offsets_.push_back(static_cast<std::uint32_t>(j));
      }
    }
    offsets_.push_back(static_cast<std::uint32_t>(n));
  }
}

std::uint64_t GridIndex::key_of(std::span<const std::int64_t> cell) const {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < dim_; ++i) {
    const auto c = std::clamp<std::int64_t>(cell[i], 0, static_cast<std::int64_t>(per_axis_) - 1);
    key = key * per_axis_ + static_cast<std::uint64_t>(c);
  }
  return key;
}

std::vector<std::int64_t> GridIndex::cell_of(std::span<const double> p) const {
  require(p.size() == dim_, "grid: dimension mismatch");
  std::vector<std::int64_t> cell(dim_);
  for (std::size_t i = 0; i < dim_; ++i) cell[i] = static_cast<std::int64_t>(std::floor(p[i] / cell_size_));
  return cell;
}

std::span<const std::uint32_t> GridIndex::bucket_by_key(std::uint64_t key) const {
  if (offsets_.empty()) return {};
  if (dense_) {
    if (key + 1 >= offsets_.size()) return {};
    return {ids_.data() + offsets_[key], static_cast<std::size_t>(offsets_[key + 1] - offsets_[key])};
  }
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return {};
  const auto j = static_cast<std::size_t>(it - keys_.begin());
  return {ids_.data() + offsets_[j], static_cast<std::size_t>(offsets_[j + 1] - offsets_[j])};
}

std::span<const std::uint32_t> GridIndex::bucket(std::span<const std::int64_t> cell) const {
  require(cell.size() == dim_, "grid: dimension mismatch");
  for (std::size_t i = 0; i < dim_; ++i)
    if (cell[i] < 0 || cell[i] >= static_cast<std::int64_t>(per_axis_)) return {};
  return bucket_by_key(key_of(cell));
}

std::size_t GridIndex::bucket_count() const {
  if (!dense_) return keys_.size();
  std::size_t count = 0;
  for (std::size_t c = 0; c + 1 < offsets_.size(); ++c) count += offsets_[c + 1] > offsets_[c];
  return count;
}

std::vector<std::uint32_t> GridIndex::query(std::span<const double> center, double radius) const {
  require(center.size() == dim_, "grid_query: dimension mismatch");
  require(radius >= 0.0, "grid_query: radius must be nonnegative");
  std::vector<std::uint32_t> out;
  visit(center, radius, [&](std::span<const std::uint32_t> ids) { out.insert(out.end(), ids.begin(), ids.end()); });
  return out;
}

}  // namespace kcap
