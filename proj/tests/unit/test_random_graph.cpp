#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "kcap/error.hpp"
#include "kcap/kcap_engine.hpp"
#include "kcap/random_graph.hpp"

using namespace kcap;

namespace {

// Kolmogorov-Smirnov distance of a sample against U(0,1).
double ks_uniform(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    d = std::max({d, (i + 1) / n - xs[i], xs[i] - i / n});
  return d;
}

}  // namespace

TEST_CASE("sample_vertices is deterministic and checks its arguments") {
  const auto a = sample_vertices(1, 1, 99);
  const auto b = sample_vertices(1, 1, 99);
  CHECK(a.flat() == b.flat());
  CHECK(sample_vertices(10, 2, 1).flat() != sample_vertices(10, 2, 2).flat());
  CHECK_THROWS_AS(sample_vertices(0, 1, 1), UsageError);
  CHECK_THROWS_AS(sample_vertices(5, 0, 1), UsageError);
  // A prefix of a larger sample is the smaller sample.
  const auto big = sample_vertices(100, 3, 5), small = sample_vertices(10, 3, 5);
  CHECK(std::equal(small.flat().begin(), small.flat().end(), big.flat().begin()));
}

TEST_CASE("sample_vertices passes a KS test in one and two dimensions") {
  const auto one = sample_vertices(100000, 1, 2024);
  CHECK(ks_uniform(one.flat()) < 0.01);
  const auto two = sample_vertices(100000, 2, 2025);
  for (std::size_t axis = 0; axis < 2; ++axis) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < two.size(); ++i) xs.push_back(two[i][axis]);
    CHECK(ks_uniform(xs) < 0.01);
  }
}

TEST_CASE("every narrow window holds a vertex at n = 1e6") {
  const std::size_t n = 1000000;
  auto xs = sample_vertices(n, 1, 77).flat();
  std::sort(xs.begin(), xs.end());
  const double width = std::sqrt(0.5) * (6.0 * std::log(static_cast<double>(n)) / static_cast<double>(n));
  Stream s(3);
  std::size_t empty = 0;
  for (int w = 0; w < 10000; ++w) {
    const double lo = s.uniform() * (1.0 - width);
    auto it = std::lower_bound(xs.begin(), xs.end(), lo);
    empty += it == xs.end() || *it > lo + width;
  }
  CHECK(empty == 0);
}

TEST_CASE("edge queries are replayable in any order") {
  const GraphModel g(200, 1, Kernel::gaussian(0.05), 8);
  std::vector<std::pair<VertexId, VertexId>> pairs;
  Stream s(1);
  for (int i = 0; i < 100000; ++i)
    pairs.emplace_back(static_cast<VertexId>(s.bounded(200)), static_cast<VertexId>(s.bounded(200)));
  std::vector<char> first;
  for (auto [a, b] : pairs) first.push_back(g.edge_present(a, b));
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[s.bounded(i + 1)]);
  std::size_t agree = 0;
  for (auto i : order) agree += g.edge_present(pairs[i].first, pairs[i].second) == static_cast<bool>(first[i]);
  CHECK(agree == pairs.size());

  // One pair asked 1e5 times.
  const bool answer = g.edge_present(3, 17);
  std::size_t same = 0;
  for (int i = 0; i < 100000; ++i) same += g.edge_present(3, 17) == answer;
  CHECK(same == 100000);
}

TEST_CASE("coincident vertices are always connected; ids are range checked") {
  const GraphModel g(PointSet(1, {0.4, 0.4, 0.9}), Kernel::gaussian(0.01), 5);
  CHECK(g.edge_present(0, 1));
  CHECK(g.edge_present(1, 0));
  CHECK(g.edge_present(2, 2));
  CHECK_THROWS_AS(g.edge_present(0, 3), UsageError);
  CHECK_THROWS_AS(g.edge_present(7, 0), UsageError);
}

TEST_CASE("edge frequency at the half-value distance is one half") {
  // Two groups of 317 coincident points; every cross pair is at distance
  // sigma sqrt(2 ln 2), so g = 1/2.
  const double sigma = 0.05;
  const double gap = sigma * std::sqrt(2.0 * std::log(2.0));
  const std::size_t m = 317;
  std::vector<double> flat(2 * m);
  std::fill(flat.begin(), flat.begin() + m, 0.3);
  std::fill(flat.begin() + m, flat.end(), 0.3 + gap);
  const GraphModel g(PointSet(1, flat), Kernel::gaussian(sigma), 123);
  std::size_t hits = 0, total = 0;
  for (VertexId s = 0; s < m; ++s)
    for (VertexId t = m; t < 2 * m; ++t) {
      hits += g.edge_present(s, t);
      ++total;
    }
  CHECK(total > 100000);
  CHECK(static_cast<double>(hits) / total == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::abs(static_cast<double>(hits) / total - 0.5) < 0.01);
}

TEST_CASE("edge frequency matches the kernel over a grid of distances and seeds") {
  const double sigma = 0.1;
  for (double dist : {0.0, 0.05, 0.1, 0.2, 0.3}) {
    std::size_t hits = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const GraphModel g(PointSet(1, {0.2, 0.2 + dist}), Kernel::gaussian(sigma), seed);
      hits += g.edge_present(0, 1) + g.edge_present(1, 0);
      total += 2;
    }
    // 40 draws per distance are too few; use fresh edge keys as well.
    const GraphModel g(PointSet(1, {0.2, 0.2 + dist}), Kernel::gaussian(sigma), 1);
    for (std::uint64_t key = 0; key < 20000; ++key) {
      hits += g.edge_present(EdgeKey(key), 0, 1);
      ++total;
    }
    const double p = std::exp(-dist * dist / (2 * sigma * sigma));
    const double sd = std::sqrt(p * (1 - p) / total);
    CHECK(std::abs(static_cast<double>(hits) / total - p) <= 3 * sd + 1e-12);
  }
}

TEST_CASE("in_degree_from matches an explicit adjacency matrix") {
  const std::size_t n = 50, k = 10;
  const GraphModel g(n, 1, Kernel::gaussian(0.1), 4);
  std::vector<std::vector<int>> adj(n, std::vector<int>(n));
  for (VertexId s = 0; s < n; ++s)
    for (VertexId t = 0; t < n; ++t) adj[s][t] = g.edge_present(s, t);
  Stream st(9);
  std::vector<VertexId> active;
  for (auto v : sample_without_replacement(n, k, st)) active.push_back(static_cast<VertexId>(v));
  for (VertexId x = 0; x < n; ++x) {
    int want = 0;
    for (auto y : active) want += adj[y][x];
    CHECK(in_degree_from(g, x, active) == static_cast<std::size_t>(want));
  }
  CHECK(in_degree_from(g, 0, std::span<const VertexId>{}) == 0);

  const GraphModel coincide(PointSet(1, {0.5, 0.5}), Kernel::gaussian(0.01), 1);
  const VertexId y[] = {1};
  CHECK(in_degree_from(coincide, 0, y) == 1);
  CHECK(in_degree_from(coincide, 0, y, 0.0) == 1);
}

TEST_CASE("cutoff drops only far pairs") {
  const GraphModel g(PointSet(1, {0.1, 0.11, 0.9}), Kernel::gaussian(0.5), 2);
  const VertexId active[] = {0, 2};
  const auto full = in_degree_from(g, 1, active);
  const auto cut = in_degree_from(g, 1, active, 0.05);
  CHECK(cut == static_cast<std::size_t>(g.edge_present(0, 1)));
  CHECK(cut <= full);
}

TEST_CASE("truncation radius formula") {
  const Kernel k = Kernel::gaussian(0.01);
  const double r = truncation_radius(k, 1000000, 100, 1e-6);
  CHECK(r == doctest::Approx(0.01 * std::sqrt(2.0 * std::log(1e14))).epsilon(1e-12));
  CHECK(k.probability(r * r) == doctest::Approx(1e-14).epsilon(1e-9));
  CHECK_THROWS_AS(truncation_radius(k, 10, 10, 0.0), UsageError);
}

TEST_CASE("truncated and exact scoring agree on random instances") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GraphModel g(1000, 1, Kernel::gaussian(0.02), seed);
    const std::size_t k = 50;
    Stream st(seed + 100);
    std::vector<VertexId> active;
    for (auto v : sample_without_replacement(1000, k, st)) active.push_back(static_cast<VertexId>(v));
    const auto exact = synaptic_input(g, active, ScoringOptions{}, g.edge_key());
    const auto cut = synaptic_input(g, active, scoring_options(g, k, EngineConfig{}), g.edge_key());
    CHECK(!scoring_options(g, k, EngineConfig{}).exact());
    std::size_t mismatched = 0;
    for (VertexId x = 0; x < 1000; ++x) mismatched += exact.at(x) != cut.at(x);
    CHECK(mismatched == 0);
  }
}

TEST_CASE("positions export round trip") {
  const GraphModel g(100, 2, Kernel::gaussian(0.1), 55);
  const auto path = std::filesystem::temp_directory_path() / "kcap_positions_test.json";
  save_positions_json(g, path.string());
  const GraphModel back = load_positions_json(path.string());
  CHECK(back.size() == 100);
  CHECK(back.dim() == 2);
  CHECK(back.graph_seed() == 55);
  CHECK(back.positions().flat() == g.positions().flat());
  for (VertexId s = 0; s < 20; ++s)
    for (VertexId t = 0; t < 20; ++t) CHECK(back.edge_present(s, t) == g.edge_present(s, t));
  std::filesystem::remove(path);
}
