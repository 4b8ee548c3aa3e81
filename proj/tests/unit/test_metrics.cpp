#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kcap/error.hpp"
#include "kcap/metrics.hpp"

using namespace kcap;

namespace {

std::vector<VertexId> all_ids(std::size_t n) {
  std::vector<VertexId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

// O(k^2) union-find clustering: the label of each active index.
std::vector<std::size_t> dense_labels(const PointSet& pts, double sep) {
  std::vector<std::size_t> parent(pts.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (squared_distance(pts[i], pts[j]) < sep * sep) parent[find(i)] = find(j);
  std::vector<std::size_t> label(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) label[i] = find(i);
  return label;
}

PointSet random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
  Stream s(seed);
  std::vector<double> flat(n * d);
  for (auto& x : flat) x = s.uniform();
  return PointSet(d, flat);
}

}  // namespace

TEST_CASE("cluster examples") {
  const PointSet two(1, {0.0, 0.01, 0.02, 0.5, 0.51});
  const auto c = cluster_active_set(two, all_ids(5), 0.1);
  REQUIRE(c.size() == 2);
  CHECK(c[0].members == std::vector<std::uint32_t>{0, 1, 2});
  CHECK(c[1].members == std::vector<std::uint32_t>{3, 4});
  CHECK(c[0].ball.radius == doctest::Approx(0.01));
  CHECK(c[1].ball.center[0] == doctest::Approx(0.505));

  const PointSet same(2, {0.3, 0.3, 0.3, 0.3, 0.3, 0.3});
  const auto one = cluster_active_set(same, all_ids(3), 0.01);
  REQUIRE(one.size() == 1);
  CHECK(one[0].ball.radius == 0.0);

  CHECK(cluster_active_set(two, std::span<const VertexId>{}, 0.1).empty());
}

TEST_CASE("clusters match a dense union-find") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t d = 1 + seed % 3;
    const std::size_t k = 50 + 20 * seed;
    const auto pts = random_points(k, d, seed);
    const double sep = 0.08 / d;
    const auto clusters = cluster_active_set(pts, all_ids(k), sep);
    const auto label = dense_labels(pts, sep);
    std::size_t distinct = 0, total = 0;
    for (std::size_t i = 0; i < k; ++i) distinct += label[i] == i;
    CHECK(clusters.size() == distinct);
    for (const auto& c : clusters) {
      total += c.member_count();
      for (auto v : c.members) CHECK(label[v] == label[c.members.front()]);
    }
    CHECK(total == k);
  }
}

TEST_CASE("clusters do not depend on the order of the active list") {
  const auto pts = random_points(200, 2, 4);
  auto ids = all_ids(200);
  const auto a = cluster_active_set(pts, ids, 0.06);
  Stream s(1);
  for (std::size_t i = ids.size() - 1; i > 0; --i) std::swap(ids[i], ids[s.bounded(i + 1)]);
  const auto b = cluster_active_set(pts, ids, 0.06);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].members == b[i].members);
    CHECK(a[i].ball.radius == b[i].ball.radius);
  }
}

TEST_CASE("expected input profile examples") {
  const Kernel g = Kernel::gaussian(0.1);
  const PointSet active(1, {0.5});
  const PointSet query(1, {0.5, 0.6, 2.0});
  const auto p = expected_input_profile(active, g, query);
  CHECK(p.expected[0] == doctest::Approx(1.0));
  CHECK(p.variance[0] == doctest::Approx(0.0));
  CHECK(p.expected[1] == doctest::Approx(std::exp(-0.5)));
  CHECK(p.variance[1] == doctest::Approx(std::exp(-0.5) * (1 - std::exp(-0.5))));
  CHECK(p.expected[2] == doctest::Approx(std::exp(-112.5)));
}

TEST_CASE("profile matches a naive double sum and its serial reference") {
  const Kernel g = Kernel::gaussian(0.07);
  const auto active = random_points(150, 2, 8);
  const auto query = random_points(400, 2, 9);
  const auto p = expected_input_profile(active, g, query);
  const auto s = expected_input_profile_serial(active, g, query);
  CHECK(p.expected == s.expected);
  CHECK(p.variance == s.variance);
  for (std::size_t q = 0; q < query.size(); ++q) {
    double e = 0, v = 0;
    for (std::size_t z = 0; z < active.size(); ++z) {
      const double w = g.probability(squared_distance(query[q], active[z]));
      e += w;
      v += w * (1 - w);
    }
    CHECK(std::abs(p.expected[q] - e) <= 1e-12 * std::max(1.0, e));
    CHECK(std::abs(p.variance[q] - v) <= 1e-12 * std::max(1.0, v));
  }
}

TEST_CASE("expected input is the mean of F over edge redraws") {
  const GraphModel g(2000, 1, Kernel::gaussian(0.03), 6);
  const std::size_t k = 40;
  std::vector<VertexId> active;
  for (VertexId v = 0; v < k; ++v) active.push_back(v * 50);
  std::vector<double> a_flat;
  for (auto v : active) a_flat.push_back(g.position(v)[0]);
  const VertexId probes[] = {3, 701, 1502};
  std::vector<double> q_flat;
  for (auto v : probes) q_flat.push_back(g.position(v)[0]);
  const auto prof = expected_input_profile(PointSet(1, a_flat), g.kernel(), PointSet(1, q_flat));
  const std::size_t draws = 4000;
  for (std::size_t i = 0; i < 3; ++i) {
    double sum = 0;
    for (std::uint64_t key = 0; key < draws; ++key) {
      const EdgeKey e(derive_seed(99, key));
      for (auto y : active) sum += g.edge_present(e, y, probes[i]);
    }
    const double se = std::sqrt(prof.variance[i] / draws);
    CHECK(std::abs(sum / draws - prof.expected[i]) <= 4 * se + 1e-12);
  }
}

TEST_CASE("gradient check examples") {
  const double sigma = 0.1;
  const auto one = gradient_bound_check(PointSet(1, {0.5}), sigma, PointSet(1, {0.6}));
  CHECK(one.bound == doctest::Approx(std::sqrt(1 / std::exp(1.0)) / sigma));
  CHECK(one.max_ratio == doctest::Approx(1.0).epsilon(1e-4));

  // k coincident points: both E' and the bound scale by k.
  const auto many = gradient_bound_check(PointSet(1, std::vector<double>(7, 0.5)), sigma, PointSet(1, {0.4}));
  CHECK(many.max_ratio == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("gradient stays below the bound on random configurations") {
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t d = 1 + seed % 3;
    const std::size_t k = 5 + seed % 40;
    const double sigma = 0.02 + 0.002 * static_cast<double>(seed);
    const auto active = random_points(k, d, seed);
    const auto sample = random_points(30, d, seed + 1000);
    const auto r = gradient_bound_check(active, sigma, sample, 0.0, seed);
    worst = std::max(worst, r.max_ratio);
    CHECK(r.max_ratio <= 1.0 + 1e-3);
  }
  CHECK(worst > 0.1);
}

TEST_CASE("fire probability with one trial marks exactly the cap") {
  const GraphModel g(500, 1, Kernel::gaussian(0.02), 1);
  const std::vector<VertexId> active{10, 20, 30, 40, 50};
  const auto est = estimate_fire_probability(g, active, 5, 1, 3, ScoringOptions{});
  const auto freq = est.dense();
  CHECK(std::count(freq.begin(), freq.end(), 1.0) == 5);
  CHECK(std::count(freq.begin(), freq.end(), 0.0) == 495);
}

TEST_CASE("fire probability on a coincident clique") {
  std::vector<double> flat(5, 0.5);
  for (int i = 0; i < 20; ++i) flat.push_back(0.9 + 0.001 * i);
  const GraphModel g(PointSet(1, flat), Kernel::gaussian(0.001), 4);
  const std::vector<VertexId> active{0, 1, 2, 3, 4};
  const auto est = estimate_fire_probability(g, active, 5, 300, 8, ScoringOptions{});
  for (VertexId v = 0; v < 5; ++v) CHECK(est.frequency(v) == 1.0);
  for (VertexId v = 5; v < 25; ++v) CHECK(est.frequency(v) == 0.0);
}

TEST_CASE("fire probability respects mirror symmetry") {
  // Vertex i at x_i and vertex i + m at 1 - x_i, with a mirrored active set.
  const std::size_t m = 300, k = 20;
  Stream s(12);
  std::vector<double> flat(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    flat[i] = 0.3 + 0.2 * s.uniform();
    flat[i + m] = 1.0 - flat[i];
  }
  const GraphModel g(PointSet(1, flat), Kernel::gaussian(0.05), 2);
  std::vector<VertexId> active;
  for (VertexId i = 0; i < k / 2; ++i) {
    active.push_back(i * 7);
    active.push_back(static_cast<VertexId>(i * 7 + m));
  }
  std::sort(active.begin(), active.end());
  const std::size_t trials = 3000;
  const auto est = estimate_fire_probability(g, active, k, trials, 5, ScoringOptions{});
  std::uint64_t total = 0;
  for (auto c : est.counts) total += c;
  CHECK(total == k * trials);
  std::size_t outside = 0;
  for (VertexId i = 0; i < m; ++i) {
    const double a = est.frequency(i), b = est.frequency(static_cast<VertexId>(i + m));
    const double p = 0.5 * (a + b);
    const double sd = std::sqrt(2 * p * (1 - p) / trials);
    outside += std::abs(a - b) > 4 * sd + 1e-12;
  }
  CHECK(outside <= 3);
}

TEST_CASE("containment examples") {
  CHECK(containment_fraction(PointSet(2, {0.4, 0.4, 0.4, 0.4}), 0.0) == 1.0);
  CHECK(containment_fraction(PointSet(1, {0.0, 1.0}), 0.5) == 0.5);
  CHECK(containment_fraction(PointSet(1, {0.0, 1.0}), 1.0) == 1.0);
  CHECK_THROWS_AS(containment_fraction(PointSet(1, {0.0}), -1.0), UsageError);
}

TEST_CASE("containment matches a sliding window on uniform points") {
  const std::size_t k = 2000;
  const auto pts = random_points(k, 1, 31);
  auto xs = pts.flat();
  std::sort(xs.begin(), xs.end());
  const double r = 0.25;
  std::size_t best = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto lo = std::lower_bound(xs.begin(), xs.end(), xs[i] - r);
    const auto hi = std::upper_bound(xs.begin(), xs.end(), xs[i] + r);
    best = std::max<std::size_t>(best, hi - lo);
  }
  const double frac = containment_fraction(pts, r);
  CHECK(frac == doctest::Approx(static_cast<double>(best) / k));
  CHECK(frac == doctest::Approx(0.5).epsilon(0.1));
}
