#pragma once

#include <cstddef>
#include <vector>

#include "clickgraph/store.hpp"

namespace clickgraph {

struct IngestSummary {
  std::size_t walks = 0;
  std::size_t new_sequences = 0;
  std::size_t new_components = 0;
  std::size_t reused_components = 0;
};

// Decomposes the walks in parallel, then commits them to the store one by one
// in input order.
IngestSummary ingest_walks(ComponentStore& store, const std::vector<Walk>& walks);

}  // namespace clickgraph
