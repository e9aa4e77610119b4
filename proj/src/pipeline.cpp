#include "clickgraph/pipeline.hpp"

#include "clickgraph/decomposer.hpp"
#include "parallel.hpp"

namespace clickgraph {

IngestSummary ingest_walks(ComponentStore& store, const std::vector<Walk>& walks) {
  std::vector<Decomposition> decomposed(walks.size());
  detail::parallel_for(walks.size(), [&](std::size_t i) { decomposed[i] = decompose(walks[i]); });

  IngestSummary summary;
  summary.walks = walks.size();
  for (std::size_t i = 0; i < walks.size(); ++i) {
    const Walk& w = walks[i];
    const InsertReport r =
        store.insert(decomposed[i], drive_info_of(w), VehicleInfo{w.vehicle_id, {}});
    summary.new_sequences += r.new_sequence ? 1 : 0;
    summary.new_components += r.new_components;
    summary.reused_components += r.reused_components;
  }
  return summary;
}

}  // namespace clickgraph
