#include "kcap/random_graph.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "kcap/error.hpp"

namespace kcap {

namespace {

constexpr std::uint64_t kPositionStream = 1;
constexpr std::uint64_t kEdgeStream = 2;

double default_cell(const Kernel& kernel, double index_cell) {
  if (index_cell > 0.0) return index_cell;
  return std::min(1.0, kernel.kind() == Kernel::Kind::gaussian ? kernel.scale() : std::sqrt(kernel.scale()));
}

}  // namespace

PointSet sample_vertices(std::size_t n, std::size_t d, std::uint64_t seed) {
  require(n >= 1, "sample_vertices: n must be at least 1");
  require(d >= 1, "sample_vertices: d must be at least 1");
  require(n < std::numeric_limits<VertexId>::max(), "sample_vertices: n too large");
  const PairHash hash(seed);
  std::vector<double> flat(n * d);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t i = 0; i < d; ++i) flat[v * d + i] = hash.uniform(v, i);
  return PointSet(d, std::move(flat));
}

GraphModel::GraphModel(std::size_t n, std::size_t d, Kernel kernel, std::uint64_t graph_seed, double index_cell)
    : GraphModel(sample_vertices(n, d, derive_seed(graph_seed, kPositionStream)), kernel, graph_seed, index_cell) {}

GraphModel::GraphModel(PointSet positions, Kernel kernel, std::uint64_t graph_seed, double index_cell)
    : positions_(std::move(positions)),
      kernel_(kernel),
      graph_seed_(graph_seed),
      edge_key_(derive_seed(graph_seed, kEdgeStream)),
      index_(positions_, default_cell(kernel, index_cell)) {
  require(!positions_.empty(), "graph needs at least one vertex");
}

bool GraphModel::edge_present(VertexId source, VertexId target) const {
  require(source < size() && target < size(), "edge_present: vertex id out of range");
  return edge_present(edge_key_, source, target);
}

std::size_t in_degree_from(const GraphModel& graph, VertexId target, std::span<const VertexId> active,
                           std::optional<double> cutoff) {
  require(target < graph.size(), "in_degree_from: vertex id out of range");
  if (cutoff) require(*cutoff >= 0.0, "in_degree_from: cutoff must be nonnegative");
  const double cut2 = cutoff ? *cutoff * *cutoff : std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  for (VertexId y : active) {
    require(y < graph.size(), "in_degree_from: active id out of range");
    if (cutoff && squared_distance(graph.position(y), graph.position(target)) > cut2) continue;
    count += graph.edge_present(graph.edge_key(), y, target);
  }
  return count;
}

double truncation_radius(const Kernel& kernel, std::size_t n, std::size_t k, double epsilon) {
  require(epsilon > 0.0, "truncation epsilon must be positive");
  const double pairs = static_cast<double>(n) * static_cast<double>(k);
  const double p = epsilon / pairs;
  if (p >= 1.0) return 0.0;
  return kernel.radius_below(p);
}

void save_positions_json(const GraphModel& graph, const std::string& path) {
  nlohmann::json j;
  j["n"] = graph.size();
  j["d"] = graph.dim();
  j["kernel"] = graph.kernel().kind() == Kernel::Kind::gaussian ? "gaussian" : "inverse_square";
  j["sigma"] = graph.kernel().scale();
  j["graph_seed"] = graph.graph_seed();
  j["coords"] = graph.positions().flat();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write positions file: " + path);
  out << j.dump() << '\n';
}

GraphModel load_positions_json(const std::string& path, double index_cell) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read positions file: " + path);
  nlohmann::json j;
  try {
    in >> j;
    const auto n = j.at("n").get<std::size_t>();
    const auto d = j.at("d").get<std::size_t>();
    auto coords = j.at("coords").get<std::vector<double>>();
    require(coords.size() == n * d, "positions file: coordinate count does not match n*d");
    const auto kind = j.value("kernel", std::string("gaussian"));
    const double scale = j.at("sigma").get<double>();
    Kernel kernel = kind == "inverse_square" ? Kernel::inverse_square(scale) : Kernel::gaussian(scale);
    return GraphModel(PointSet(d, std::move(coords)), kernel, j.at("graph_seed").get<std::uint64_t>(), index_cell);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("positions file " + path + ": " + e.what());
  }
}

}  // namespace kcap
