// Serial vs OpenMP scoring and profile kernels.
//   kcap_bench [--n N] [--k K] [--d D] [--reps R]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "kcap/kcap_engine.hpp"
#include "kcap/metrics.hpp"

using namespace kcap;

template <class F>
static double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

int main(int argc, char** argv) {
  CLI::App app{"scoring benchmark"};
  std::size_t n = 1000000, k = 100, d = 1;
  int reps = 3;
  app.add_option("--n", n, "Vertices");
  app.add_option("--k", k, "Active set size");
  app.add_option("--d", d, "Dimension");
  app.add_option("--reps", reps, "Timing repetitions (best is reported)");
  CLI11_PARSE(app, argc, argv);

  const double sigma = std::pow(static_cast<double>(k), -1.0 / static_cast<double>(d));
  const GraphModel graph(n, d, Kernel::gaussian(sigma), 11);
  Stream stream(12);
  std::vector<VertexId> active;
  for (auto v : sample_without_replacement(n, k, stream)) active.push_back(static_cast<VertexId>(v));
  const auto options = scoring_options(graph, k, EngineConfig{});
  const auto candidates = candidate_vertices(graph, active, options);
  std::printf("n=%zu k=%zu d=%zu threads=%d cutoff=%.4g candidates=%zu\n", n, k, d, omp_get_max_threads(),
              options.cutoff, candidates.size());

  SynapticInput a, b;
  const double ts = best_of(reps, [&] { a = synaptic_input_serial(graph, active, options, graph.edge_key()); });
  const double tp = best_of(reps, [&] { b = synaptic_input(graph, active, options, graph.edge_key()); });
  std::printf("synaptic_input  serial %.3f s  omp %.3f s  speedup %.2f  identical=%s\n", ts, tp, ts / tp,
              a.counts == b.counts && a.ids == b.ids ? "yes" : "no");

  const auto query = graph.positions().subset(candidates);
  const auto act = graph.positions().subset(active);
  InputProfile pa, pb;
  const double ps = best_of(reps, [&] { pa = expected_input_profile_serial(act, graph.kernel(), query); });
  const double pp = best_of(reps, [&] { pb = expected_input_profile(act, graph.kernel(), query); });
  std::printf("input_profile   serial %.3f s  omp %.3f s  speedup %.2f  identical=%s\n", ps, pp, ps / pp,
              pa.expected == pb.expected ? "yes" : "no");

  Process process(graph, k, 21, 22);
  const double step = best_of(1, [&] { process.step(); });
  std::printf("one process step (incl. clustering) %.3f s\n", step);
  return 0;
}
