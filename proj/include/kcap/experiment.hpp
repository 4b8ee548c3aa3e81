#pragma once

// Running configured experiments and writing their artifacts.
//
// Output layout for one run directory:
//   manifest.cfg   re-runnable config, tool version, sha256 of every output
//   trace.jsonl    one object per step (discrete) or per iteration (continuous)
//   metrics.csv    per-step metrics (discrete)
//   summary.csv    one row per replicate
//   timing.csv     wall clock per step; not hashed, varies between runs
// plus continuous.csv, bounds.csv or profile_t<t>.csv depending on the mode.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kcap/config.hpp"
#include "kcap/random_graph.hpp"
#include "kcap/trace.hpp"

namespace kcap {

inline constexpr const char* kVersion = "0.3.0";
inline constexpr const char* kOutputRootEnv = "KCAP_OUTPUT_ROOT";

/// $KCAP_OUTPUT_ROOT if set, else the working directory.
std::filesystem::path output_root();
/// The config's output_dir (default out/<mode>) resolved against output_root().
std::filesystem::path resolve_output_dir(const ExperimentConfig& config);

struct RunSummary {
  std::size_t k = 0;
  std::size_t n = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;  // graph seed
  std::size_t steps = 0;
  std::optional<std::size_t> steps_to_single_cluster;
  double final_radius = 0.0;
  std::size_t t1_cluster_count = 0;
  std::optional<std::int64_t> c0;
  std::string status = "ok";
  std::string message;
};

/// First t such that A_t and every later recorded step form one cluster.
std::optional<std::size_t> steps_to_single_cluster(const RunTrace& trace);
RunSummary summarize(const RunTrace& trace, const ExperimentConfig& config);
void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& rows);

GraphModel build_graph(const ExperimentConfig& config);
RunOptions run_options(const ExperimentConfig& config);

struct Artifacts {
  std::filesystem::path dir;
  std::vector<std::filesystem::path> files;
  std::vector<RunSummary> summaries;  // discrete and fire-prob modes
};

/// Executes the configured mode and writes its artifacts. I/O failures raise
/// std::runtime_error naming the path.
Artifacts run_experiment(const ExperimentConfig& config);

struct SweepResult {
  std::filesystem::path csv;
  std::vector<RunSummary> rows;
};

/// Runs every cell of the grid, `parallelism` cells at a time. A failing
/// cell is recorded with status "error" and the sweep continues.
SweepResult sweep(const SweepSpec& spec, const std::filesystem::path& out_dir);

enum class PlotKind { support_histogram, profile, radius_curve };
PlotKind parse_plot_kind(const std::string& name);

/// CSV for plotting from a discrete run directory. `step` selects the step
/// for profile (default: last). Returns the written path.
std::filesystem::path emit_plot_data(const std::filesystem::path& trace_path, PlotKind kind,
                                     std::optional<std::size_t> step = std::nullopt,
                                     std::optional<std::filesystem::path> out = std::nullopt);

/// vertex, x0..x{d-1}, expected_input, variance, fire_frequency over the
/// cutoff neighbourhood of `active`.
void write_profile_csv(const std::filesystem::path& path, const GraphModel& graph,
                       std::span<const VertexId> active, const ExperimentConfig& config, std::size_t step);

std::string sha256_file(const std::filesystem::path& path);

/// (file name, sha256) pairs recorded in a manifest.
std::vector<std::pair<std::string, std::string>> manifest_hashes(const std::filesystem::path& manifest);

}  // namespace kcap
