#include "kcap/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "kcap/error.hpp"
#include "kcap/metrics.hpp"
#include "kcap/prob_bounds.hpp"
#include "kcap/trace_io.hpp"

namespace kcap {

namespace fs = std::filesystem;

fs::path output_root() {
  if (const char* root = std::getenv(kOutputRootEnv); root && *root) return fs::path(root);
  return fs::current_path();
}

fs::path resolve_output_dir(const ExperimentConfig& config) {
  fs::path dir = config.output_dir.empty() ? fs::path("out") / to_string(config.mode) : fs::path(config.output_dir);
  return dir.is_absolute() ? dir : output_root() / dir;
}

std::optional<std::size_t> steps_to_single_cluster(const RunTrace& trace) {
  std::optional<std::size_t> first;
  for (const auto& s : trace.steps) {
    if (s.clusters.size() != 1)
      first.reset();
    else if (!first)
      first = s.t;
  }
  return first;
}

RunSummary summarize(const RunTrace& trace, const ExperimentConfig& config) {
  RunSummary row;
  row.k = trace.k;
  row.n = trace.n;
  row.sigma = trace.sigma;
  row.seed = config.graph_seed;
  require(!trace.steps.empty(), "summarize: empty trace");
  row.steps = trace.steps.back().t;
  row.steps_to_single_cluster = steps_to_single_cluster(trace);
  row.final_radius = trace.steps.back().max_radius;
  row.t1_cluster_count = trace.steps.size() > 1 ? trace.steps[1].clusters.size() : 0;
  row.c0 = trace.steps.front().threshold;
  return row;
}

void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& rows) {
  out << "k,n,sigma,seed,steps,steps_to_single_cluster,final_radius,t1_cluster_count,c0,status,message\n";
  for (const auto& r : rows) {
    std::string message = r.message;
    std::replace(message.begin(), message.end(), ',', ';');
    std::replace(message.begin(), message.end(), '\n', ' ');
    out << r.k << ',' << r.n << ',' << format_double(r.sigma) << ',' << r.seed << ',' << r.steps << ','
        << (r.steps_to_single_cluster ? std::to_string(*r.steps_to_single_cluster) : "") << ','
        << format_double(r.final_radius) << ',' << r.t1_cluster_count << ','
        << (r.c0 ? std::to_string(*r.c0) : "") << ',' << r.status << ',' << message << '\n';
  }
}

GraphModel build_graph(const ExperimentConfig& config) {
  return GraphModel(config.n, config.d, config.make_kernel(), config.graph_seed);
}

RunOptions run_options(const ExperimentConfig& config) {
  RunOptions options;
  options.engine = config.engine;
  options.stop = config.stop;
  options.separation = config.separation;
  return options;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

std::vector<std::pair<std::string, std::string>> manifest_hashes(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw std::runtime_error("cannot open " + manifest.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string hash_mark, tag, name, hex;
    if (ss >> hash_mark >> tag >> name >> hex && hash_mark == "#" && tag == "sha256") out.emplace_back(name, hex);
  }
  return out;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void close_checked(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ExperimentConfig replicate_config(const ExperimentConfig& config, std::size_t r) {
  ExperimentConfig c = config;
  c.graph_seed += r;
  c.init_seed += r;
  c.process_seed += r;
  c.replicates = 1;
  return c;
}

void write_run_files(const fs::path& dir, const RunTrace& trace, const ExperimentConfig& config,
                     const PointSet& positions, Artifacts& artifacts) {
  const auto trace_path = dir / "trace.jsonl";
  auto out = open_out(trace_path);
  write_trace_jsonl(out, trace, config.record_members);
  close_checked(out, trace_path);

  const auto radii = config.resolved_radii();
  std::vector<std::vector<double>> containment;
  for (double r : radii) containment.push_back(containment_fraction(positions, trace, r));
  const auto metrics_path = dir / "metrics.csv";
  auto metrics = open_out(metrics_path);
  write_metrics_csv(metrics, trace, radii, containment);
  close_checked(metrics, metrics_path);

  const auto timing_path = dir / "timing.csv";
  auto timing = open_out(timing_path);
  timing << "t,wall_seconds\n";
  for (const auto& s : trace.steps) timing << s.t << ',' << format_double(s.wall_seconds) << '\n';
  close_checked(timing, timing_path);

  artifacts.files.insert(artifacts.files.end(), {trace_path, metrics_path, timing_path});
}

void run_discrete(const ExperimentConfig& config, const fs::path& dir, Artifacts& artifacts) {
  for (std::size_t r = 0; r < config.replicates; ++r) {
    const auto cr = replicate_config(config, r);
    const fs::path sub = config.replicates > 1 ? dir / ("replicate_" + std::to_string(r)) : dir;
    fs::create_directories(sub);
    const GraphModel graph = build_graph(cr);
    const RunTrace trace = run(graph, cr.k, cr.init_seed, cr.process_seed, run_options(cr));
    write_run_files(sub, trace, cr, graph.positions(), artifacts);
    artifacts.summaries.push_back(summarize(trace, cr));
  }
}

void run_fire_prob(const ExperimentConfig& config, const fs::path& dir, Artifacts& artifacts) {
  const GraphModel graph = build_graph(config);
  Process process(graph, config.k, config.init_seed, config.process_seed, run_options(config));
  const std::size_t last = *std::max_element(config.at_steps.begin(), config.at_steps.end());
  for (std::size_t t = 0;; ++t) {
    if (std::find(config.at_steps.begin(), config.at_steps.end(), t) != config.at_steps.end()) {
      const auto path = dir / ("profile_t" + std::to_string(t) + ".csv");
      write_profile_csv(path, graph, process.current().members, config, t);
      artifacts.files.push_back(path);
    }
    if (t == last) break;
    process.step();
  }
  const RunTrace trace = process.take_trace();
  write_run_files(dir, trace, config, graph.positions(), artifacts);
  artifacts.summaries.push_back(summarize(trace, config));
}

void run_continuous_mode(const ExperimentConfig& config, const fs::path& dir, Artifacts& artifacts) {
  const auto trace = run_continuous(config.initial_union(), config.make_kernel(), config.continuous_max_steps);
  const auto jsonl = dir / "trace.jsonl";
  auto out = open_out(jsonl);
  write_continuous_jsonl(out, trace);
  close_checked(out, jsonl);
  const auto csv = dir / "continuous.csv";
  auto table = open_out(csv);
  write_continuous_csv(table, trace);
  close_checked(table, csv);
  artifacts.files.insert(artifacts.files.end(), {jsonl, csv});
}

void run_bounds(const ExperimentConfig& config, const fs::path& dir, Artifacts& artifacts) {
  const auto rows = validation_table(config.bound_seed, config.bound_trials);
  const auto csv = dir / "bounds.csv";
  auto out = open_out(csv);
  write_validation_csv(out, rows);
  close_checked(out, csv);
  artifacts.files.push_back(csv);
}

void write_manifest(const fs::path& dir, const ExperimentConfig& config, Artifacts& artifacts) {
  const auto path = dir / "manifest.cfg";
  auto out = open_out(path);
  out << "# kcap " << kVersion << '\n';
  write_config(out, config);
  out << '\n';
  for (const auto& file : artifacts.files) {
    if (file.filename() == "timing.csv") continue;
    out << "# sha256 " << fs::relative(file, dir).generic_string() << ' ' << sha256_file(file) << '\n';
  }
  close_checked(out, path);
  artifacts.files.push_back(path);
}

}  // namespace

Artifacts run_experiment(const ExperimentConfig& config) {
  Artifacts artifacts;
  artifacts.dir = resolve_output_dir(config);
  std::error_code ec;
  fs::create_directories(artifacts.dir, ec);
  if (ec) throw std::runtime_error("cannot create " + artifacts.dir.string() + ": " + ec.message());

  switch (config.mode) {
    case Mode::discrete: run_discrete(config, artifacts.dir, artifacts); break;
    case Mode::fire_prob: run_fire_prob(config, artifacts.dir, artifacts); break;
    case Mode::continuous: run_continuous_mode(config, artifacts.dir, artifacts); break;
    case Mode::bounds: run_bounds(config, artifacts.dir, artifacts); break;
  }
  if (!artifacts.summaries.empty()) {
    const auto path = artifacts.dir / "summary.csv";
    auto out = open_out(path);
    write_summary_csv(out, artifacts.summaries);
    close_checked(out, path);
    artifacts.files.push_back(path);
  }
  write_manifest(artifacts.dir, config, artifacts);
  return artifacts;
}

SweepResult sweep(const SweepSpec& spec, const fs::path& out_dir) {
  const auto cells = spec.expand();
  fs::create_directories(out_dir);
  SweepResult result;
  result.rows.resize(cells.size());
  const auto count = static_cast<std::int64_t>(cells.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(static_cast<int>(spec.parallelism))
  for (std::int64_t i = 0; i < count; ++i) {
    auto cell = cells[static_cast<std::size_t>(i)];
    cell.output_dir = (out_dir / ("cell_" + std::to_string(i))).string();
    RunSummary& row = result.rows[static_cast<std::size_t>(i)];
    try {
      row = run_experiment(cell).summaries.front();
    } catch (const std::exception& e) {
      row.k = cell.k;
      row.n = cell.n;
      row.sigma = cell.resolved_sigma();
      row.seed = cell.graph_seed;
      row.status = "error";
      row.message = e.what();
    }
  }
  result.csv = out_dir / "sweep.csv";
  auto out = open_out(result.csv);
  write_summary_csv(out, result.rows);
  close_checked(out, result.csv);
  return result;
}

PlotKind parse_plot_kind(const std::string& name) {
  if (name == "support-histogram") return PlotKind::support_histogram;
  if (name == "profile") return PlotKind::profile;
  if (name == "radius-curve") return PlotKind::radius_curve;
  throw UsageError("unknown plot kind '" + name + "' (support-histogram, profile, radius-curve)");
}

void write_profile_csv(const fs::path& path, const GraphModel& graph, std::span<const VertexId> active,
                       const ExperimentConfig& config, std::size_t step) {
  const std::size_t k = active.size();
  const auto scoring = scoring_options(graph, k, config.engine);
  const auto candidates = candidate_vertices(graph, active, scoring);
  const auto estimate = estimate_fire_probability(graph, active, k, config.trials, derive_seed(config.fire_seed, step),
                                                  scoring, std::span<const VertexId>(candidates));
  const std::vector<VertexId> active_ids(active.begin(), active.end());
  const auto profile =
      expected_input_profile(graph.positions().subset(active_ids), graph.kernel(), graph.positions().subset(candidates));

  auto out = open_out(path);
  out << "vertex";
  for (std::size_t i = 0; i < graph.dim(); ++i) out << ",x" << i;
  out << ",expected_input,variance,fire_frequency\n";
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    out << candidates[j];
    for (double x : graph.position(candidates[j])) out << ',' << format_double(x);
    out << ',' << format_double(profile.expected[j]) << ',' << format_double(profile.variance[j]) << ','
        << format_double(estimate.frequency(candidates[j])) << '\n';
  }
  close_checked(out, path);
}

fs::path emit_plot_data(const fs::path& trace_path, PlotKind kind, std::optional<std::size_t> step,
                        std::optional<fs::path> out_path) {
  std::ifstream in(trace_path);
  if (!in) throw std::runtime_error("cannot open " + trace_path.string());
  const RunTrace trace = read_trace_jsonl(in);
  if (trace.steps.empty()) throw std::runtime_error("empty trace: " + trace_path.string());

  const fs::path dir = trace_path.parent_path();
  const std::string name = kind == PlotKind::radius_curve        ? "radius_curve"
                           : kind == PlotKind::support_histogram ? "support_histogram"
                                                                 : "profile";
  fs::path path = out_path ? *out_path : dir / ("plot_" + name + ".csv");

  if (kind == PlotKind::radius_curve) {
    auto out = open_out(path);
    out << "t,max_radius,min_radius,n_clusters\n";
    for (const auto& s : trace.steps)
      out << s.t << ',' << format_double(s.max_radius) << ',' << format_double(s.min_radius) << ','
          << s.clusters.size() << '\n';
    close_checked(out, path);
    return path;
  }

  for (const auto& s : trace.steps)
    if (s.members.empty())
      throw std::runtime_error("trace has no member ids (record_members = false): " + trace_path.string());

  // Graph and seeds come from the run's manifest; replicate directories sit
  // one level below it.
  std::size_t replicate = 0;
  fs::path manifest = dir / "manifest.cfg";
  const std::string leaf = dir.filename().string();
  if (leaf.rfind("replicate_", 0) == 0) {
    replicate = std::stoul(leaf.substr(10));
    manifest = dir.parent_path() / "manifest.cfg";
  }
  ExperimentConfig config = replicate_config(parse_config_file(manifest.string()), replicate);
  const GraphModel graph = build_graph(config);

  if (kind == PlotKind::support_histogram) {
    constexpr std::size_t bins = 50;
    auto out = open_out(path);
    out << "t,bin,lo,hi,count\n";
    for (const auto& s : trace.steps) {
      std::vector<std::size_t> counts(bins, 0);
      for (auto v : s.members) {
        const auto b = std::min(bins - 1, static_cast<std::size_t>(graph.position(v)[0] * bins));
        ++counts[b];
      }
      for (std::size_t b = 0; b < bins; ++b)
        out << s.t << ',' << b << ',' << format_double(static_cast<double>(b) / bins) << ','
            << format_double(static_cast<double>(b + 1) / bins) << ',' << counts[b] << '\n';
    }
    close_checked(out, path);
    return path;
  }

  const std::size_t t = step.value_or(trace.steps.back().t);
  const auto it = std::find_if(trace.steps.begin(), trace.steps.end(), [t](const StepRecord& s) { return s.t == t; });
  if (it == trace.steps.end()) throw UsageError("profile: step " + std::to_string(t) + " is not in the trace");
  if (!out_path) path = dir / ("plot_profile_t" + std::to_string(t) + ".csv");
  write_profile_csv(path, graph, it->members, config, t);
  return path;
}

}  // namespace kcap
