#include "kcap/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "kcap/error.hpp"

namespace kcap {

using nlohmann::json;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

json cluster_json(const ClusterSummary& c) {
  return json{{"center", c.ball.center}, {"radius", c.ball.radius}, {"size", c.member_count()}};
}

}  // namespace

void write_trace_jsonl(std::ostream& out, const RunTrace& trace, bool with_members) {
  for (const auto& s : trace.steps) {
    json row;
    row["t"] = s.t;
    row["threshold"] = s.threshold ? json(*s.threshold) : json(nullptr);
    row["certain_count"] = s.certain_count;
    row["tie_pool_size"] = s.tie_pool_size;
    row["n_clusters"] = s.clusters.size();
    row["max_radius"] = s.max_radius;
    row["min_radius"] = s.min_radius;
    row["overlap_prev"] = s.overlap_prev;
    row["overlap_past"] = s.overlap_past;
    json clusters = json::array();
    for (const auto& c : s.clusters) {
      auto cj = cluster_json(c);
      if (with_members) cj["members"] = c.members;
      clusters.push_back(std::move(cj));
    }
    row["clusters"] = std::move(clusters);
    if (with_members) row["members"] = s.members;
    out << row.dump() << '\n';
  }
  if (!out) throw std::runtime_error("write_trace_jsonl: write failed");
}

RunTrace read_trace_jsonl(std::istream& in) {
  RunTrace trace;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + e.what());
    }
    StepRecord s;
    s.t = row.at("t").get<std::size_t>();
    if (!row.at("threshold").is_null()) s.threshold = row["threshold"].get<std::int64_t>();
    s.certain_count = row.at("certain_count").get<std::size_t>();
    s.tie_pool_size = row.at("tie_pool_size").get<std::size_t>();
    s.max_radius = row.at("max_radius").get<double>();
    s.min_radius = row.at("min_radius").get<double>();
    s.overlap_prev = row.at("overlap_prev").get<std::size_t>();
    s.overlap_past = row.at("overlap_past").get<std::size_t>();
    if (row.contains("members")) s.members = row["members"].get<std::vector<std::uint32_t>>();
    for (const auto& cj : row.at("clusters")) {
      ClusterSummary c;
      c.ball.center = cj.at("center").get<std::vector<double>>();
      c.ball.radius = cj.at("radius").get<double>();
      if (cj.contains("members")) c.members = cj["members"].get<std::vector<std::uint32_t>>();
      s.clusters.push_back(std::move(c));
    }
    trace.steps.push_back(std::move(s));
  }
  return trace;
}

void write_metrics_csv(std::ostream& out, const RunTrace& trace, const std::vector<double>& radii,
                       const std::vector<std::vector<double>>& containment) {
  require(containment.size() == radii.size(), "write_metrics_csv: one containment series per radius");
  out << "t,threshold,certain_count,tie_pool_size,n_clusters,max_radius,min_radius,overlap_prev,overlap_past";
  for (std::size_t i = 0; i < radii.size(); ++i) out << ",containment_" << i;
  out << '\n';
  for (std::size_t row = 0; row < trace.steps.size(); ++row) {
    const auto& s = trace.steps[row];
    out << s.t << ',' << (s.threshold ? std::to_string(*s.threshold) : "") << ',' << s.certain_count << ','
        << s.tie_pool_size << ',' << s.clusters.size() << ',' << format_double(s.max_radius) << ','
        << format_double(s.min_radius) << ',' << s.overlap_prev << ',' << s.overlap_past;
    for (const auto& series : containment) out << ',' << format_double(series.at(row));
    out << '\n';
  }
}

void write_continuous_jsonl(std::ostream& out, const ContinuousTrace& trace) {
  for (const auto& s : trace.steps) {
    json row;
    row["t"] = s.t;
    row["threshold"] = s.threshold ? json(*s.threshold) : json(nullptr);
    row["n_intervals"] = s.set.size();
    row["measure"] = s.set.measure();
    row["potential"] = s.potential;
    json ivs = json::array();
    for (const auto& iv : s.set.intervals()) ivs.push_back({iv.lo, iv.hi});
    row["intervals"] = std::move(ivs);
    out << row.dump() << '\n';
  }
}

void write_continuous_csv(std::ostream& out, const ContinuousTrace& trace) {
  out << "t,n_intervals,threshold,potential,endpoints\n";
  for (const auto& s : trace.steps) {
    out << s.t << ',' << s.set.size() << ',' << (s.threshold ? format_double(*s.threshold) : "") << ','
        << format_double(s.potential) << ',';
    bool first = true;
    for (const auto& iv : s.set.intervals()) {
      if (!first) out << ';';
      out << format_double(iv.lo) << ':' << format_double(iv.hi);
      first = false;
    }
    out << '\n';
  }
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::runtime_error("csv: no column named " + name);
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: missing header");
  table.header = split_row(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto row = split_row(line);
    if (row.size() != table.header.size())
      throw std::runtime_error("csv line " + std::to_string(lineno) + ": expected " +
                               std::to_string(table.header.size()) + " fields, got " + std::to_string(row.size()));
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv(in);
}

}  // namespace kcap
