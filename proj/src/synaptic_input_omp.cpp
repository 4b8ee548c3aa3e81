#include <omp.h>

#include "scoring_detail.hpp"

namespace kcap {

SynapticInput synaptic_input(const GraphModel& graph, std::span<const VertexId> active,
                             const ScoringOptions& options, const EdgeKey& key,
                             std::optional<std::span<const VertexId>> candidates) {
  detail::validate_active(graph, active);
  SynapticInput out;
  out.n = graph.size();
  out.ids = detail::resolve_candidates(graph, active, options, candidates);
  out.counts.resize(out.ids.size());
  const detail::ActiveScorer score(graph, active, options, key);
  const auto m = static_cast<std::int64_t>(out.ids.size());
#pragma omp parallel for schedule(dynamic, 2048)
  for (std::int64_t i = 0; i < m; ++i) out.counts[i] = score(out.ids[i]);
  return out;
}

}  // namespace kcap
