#pragma once

// Newline-delimited JSON traces and CSV tables. Doubles are written with 17
// significant digits so files round-trip and compare byte for byte.

#include <iosfwd>
#include <string>
#include <vector>

#include "kcap/alpha_cap.hpp"
#include "kcap/trace.hpp"

namespace kcap {

void write_trace_jsonl(std::ostream& out, const RunTrace& trace, bool with_members);
/// Reads the per-step records. Run-level fields (n, k, sigma, ...) are not
/// part of the JSONL stream and are left at their defaults.
RunTrace read_trace_jsonl(std::istream& in);

/// Per-step metrics. One containment column per radius, named
/// containment_<i> in the order given.
void write_metrics_csv(std::ostream& out, const RunTrace& trace, const std::vector<double>& radii,
                       const std::vector<std::vector<double>>& containment);

void write_continuous_jsonl(std::ostream& out, const ContinuousTrace& trace);
/// t,n_intervals,threshold,potential,endpoints ("a:b;a:b").
void write_continuous_csv(std::ostream& out, const ContinuousTrace& trace);

std::string format_double(double x);

/// Minimal CSV reader for our own outputs (no quoting, comma separated).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

}  // namespace kcap
