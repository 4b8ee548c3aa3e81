// kcap: command-line front end.
//
//   kcap run <config>          run whatever mode the config names
//   kcap sweep <spec>          parameter grid over k, sigma multipliers, seeds
//   kcap continuous <config>   continuous alpha-cap iteration
//   kcap fire-prob <config>    firing-probability profiles at chosen steps
//   kcap bounds                probability-bound validation table (CSV)
//   kcap plot <trace.jsonl> --kind K
//   kcap export-positions <config> <out.json>
//
// Exit status: 0 success, 1 usage error, 2 runtime error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kcap/config.hpp"
#include "kcap/error.hpp"
#include "kcap/experiment.hpp"
#include "kcap/prob_bounds.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kRuntime = 2;

void report(const kcap::Artifacts& artifacts) {
  std::cout << "output: " << artifacts.dir.string() << '\n';
  for (const auto& f : artifacts.files) std::cout << "  " << f.filename().string() << '\n';
  for (const auto& s : artifacts.summaries) {
    std::cout << "k=" << s.k << " n=" << s.n << " seed=" << s.seed << " steps=" << s.steps << " single_cluster_from="
              << (s.steps_to_single_cluster ? std::to_string(*s.steps_to_single_cluster) : "never")
              << " final_radius=" << s.final_radius << '\n';
  }
}

kcap::ExperimentConfig load(const std::string& path, std::optional<kcap::Mode> mode, const std::string& out) {
  auto config = kcap::parse_config_file(path, mode);
  if (!out.empty()) config.output_dir = out;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-cap process simulation on geometric random graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kcap::kVersion);

  std::string config_path, out_dir, trace_path, kind, json_path;
  std::optional<std::size_t> step;
  std::size_t trials = 1000000;
  std::uint64_t seed = 1;

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides output_dir)");

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("spec", config_path, "Sweep spec file")->required();
  sweep->add_option("--out", out_dir, "Output directory (overrides output_dir)");

  auto* continuous = app.add_subcommand("continuous", "Iterate the continuous alpha-cap process");
  continuous->add_option("config", config_path, "Config file")->required();
  continuous->add_option("--out", out_dir, "Output directory (overrides output_dir)");

  auto* fire = app.add_subcommand("fire-prob", "Estimate firing probabilities by redrawing edges");
  fire->add_option("config", config_path, "Config file")->required();
  fire->add_option("--out", out_dir, "Output directory (overrides output_dir)");

  auto* bounds = app.add_subcommand("bounds", "Validate the probability bounds by simulation");
  bounds->add_option("--out", out_dir, "Output directory (default out/bounds)");
  bounds->add_option("--trials", trials, "Monte Carlo samples per distribution")->check(CLI::Range(1000, 1000000000));
  bounds->add_option("--seed", seed, "Seed");

  auto* plot = app.add_subcommand("plot", "Write plot-ready CSV from a discrete trace");
  plot->add_option("trace", trace_path, "trace.jsonl of a discrete run")->required();
  plot->add_option("--kind", kind, "support-histogram, profile or radius-curve")->required();
  plot->add_option("--step", step, "Step for the profile (default: last)");
  plot->add_option("--out", out_dir, "Output CSV path");

  auto* exportpos = app.add_subcommand("export-positions", "Write vertex positions as JSON");
  exportpos->add_option("config", config_path, "Config file")->required();
  exportpos->add_option("output", json_path, "Output JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (run->parsed()) {
      report(kcap::run_experiment(load(config_path, std::nullopt, out_dir)));
    } else if (continuous->parsed()) {
      report(kcap::run_experiment(load(config_path, kcap::Mode::continuous, out_dir)));
    } else if (fire->parsed()) {
      report(kcap::run_experiment(load(config_path, kcap::Mode::fire_prob, out_dir)));
    } else if (sweep->parsed()) {
      auto spec = kcap::parse_sweep_file(config_path);
      if (!out_dir.empty()) spec.base.output_dir = out_dir;
      const auto dir = kcap::resolve_output_dir(spec.base);
      const auto result = kcap::sweep(spec, dir);
      std::size_t failed = 0;
      for (const auto& r : result.rows) failed += r.status != "ok";
      std::cout << "sweep: " << result.rows.size() << " cells, " << failed << " failed -> " << result.csv.string()
                << '\n';
      return failed == 0 ? 0 : kRuntime;
    } else if (bounds->parsed()) {
      kcap::ExperimentConfig config;
      config.mode = kcap::Mode::bounds;
      config.bound_trials = trials;
      config.bound_seed = seed;
      config.output_dir = out_dir;
      const auto artifacts = kcap::run_experiment(config);
      std::ifstream table(artifacts.dir / "bounds.csv");
      std::cout << table.rdbuf();
    } else if (plot->parsed()) {
      std::optional<std::filesystem::path> out;
      if (!out_dir.empty()) out = out_dir;
      std::cout << kcap::emit_plot_data(trace_path, kcap::parse_plot_kind(kind), step, out).string() << '\n';
    } else if (exportpos->parsed()) {
      const auto config = kcap::parse_config_file(config_path);
      kcap::save_positions_json(kcap::build_graph(config), json_path);
    }
  } catch (const kcap::UsageError& e) {
    std::cerr << "kcap: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "kcap: " << e.what() << '\n';
    return kRuntime;
  }
  return 0;
}
