#pragma once

// Experiment configuration: flat key = value text, optionally grouped into
// [graph], [run], [continuous], [fire_prob] and [sweep] sections. Keys are
// unique across sections, so a section header is only a grouping aid. Lines
// starting with '#' are comments. See FORMATS.md for the key list.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kcap/alpha_cap.hpp"
#include "kcap/geometry.hpp"
#include "kcap/kcap_engine.hpp"

namespace kcap {

enum class Mode { discrete, continuous, bounds, fire_prob };

std::string to_string(Mode mode);

struct ExperimentConfig {
  Mode mode = Mode::discrete;
  std::string output_dir;  // empty: out/<mode>

  // [graph]
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t d = 1;
  std::optional<double> beta;   // n = round(k^beta)
  std::optional<double> sigma;  // unset: k^(-1/d)
  Kernel::Kind kernel = Kernel::Kind::gaussian;
  double c = 0.01;  // inverse-square offset
  std::uint64_t graph_seed = 1;

  // [run]
  std::uint64_t init_seed = 2;
  std::uint64_t process_seed = 3;
  StopRule stop;
  EngineConfig engine;
  double separation = 0.0;  // <= 0: 2 sigma sqrt(ln n)
  std::size_t replicates = 1;
  bool record_members = true;
  std::vector<double> containment_radii;  // empty: sigma k^(-1/3 + 0.1)

  // [continuous]
  std::vector<Interval> intervals;
  std::size_t random_intervals = 0;
  double alpha = 0.1;
  std::uint64_t interval_seed = 1;
  std::size_t continuous_max_steps = 10000;

  // [fire_prob]
  std::size_t trials = 200;
  std::vector<std::size_t> at_steps{0};
  std::uint64_t fire_seed = 7;

  // [bounds]
  std::size_t bound_trials = 1000000;
  std::uint64_t bound_seed = 1;

  double resolved_sigma() const;
  Kernel make_kernel() const;
  IntervalUnion initial_union() const;
  std::vector<double> resolved_radii() const;
};

/// Parses and validates. Unknown keys, malformed values and violated
/// invariants raise UsageError naming the key.
/// `mode` overrides the file's own mode key.
ExperimentConfig parse_config(std::istream& in, std::optional<Mode> mode = std::nullopt);
ExperimentConfig parse_config_file(const std::string& path, std::optional<Mode> mode = std::nullopt);

/// Re-runnable text form, every key written explicitly.
void write_config(std::ostream& out, const ExperimentConfig& config);

struct SweepSpec {
  ExperimentConfig base;
  std::vector<std::size_t> k_values;
  std::vector<double> sigma_multipliers{1.0};
  std::size_t seeds = 1;
  std::size_t parallelism = 1;

  /// One config per (k, multiplier, seed); seed s offsets all three seeds of
  /// the base config by s.
  std::vector<ExperimentConfig> expand() const;
};

SweepSpec parse_sweep(std::istream& in);
SweepSpec parse_sweep_file(const std::string& path);

}  // namespace kcap
