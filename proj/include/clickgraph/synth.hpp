#pragma once

// Synthetic FSAs and clickstream workloads.
//
// Walks model habitual usage: with probability `reuse_skew` the next
// transition is drawn Zipf-like over a ranking that puts transitions already
// taken in this walk first (most taken first) and the FSA's fixed preference
// order after them; otherwise it is drawn uniformly. Every walk derives its own
// sub-seed from (seed, walk index), so output depends only on the parameters.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "clickgraph/model.hpp"

namespace clickgraph {

struct Fsa {
  std::vector<StateId> states;
  std::vector<TransitEdge> edges;  // sorted
  // successors[i]: target state indexes of state i, in preference order
  std::vector<std::vector<std::uint32_t>> successors;

  bool has_edge(const StateId& from, const StateId& to) const;
};

// n_states states named S0..S{n-1}; n_edges distinct directed edges (self
// loops allowed). Always contains a Hamiltonian cycle, so every state has an
// out-edge and the graph is strongly connected. Throws InfeasibleParameters
// unless 1 <= n_states <= n_edges <= n_states^2.
Fsa generate_fsa(std::size_t n_states, std::size_t n_edges, std::uint64_t seed);

struct LengthDistribution {
  double mean = 50.0;          // geometric, in vertices
  std::size_t max = 500;       // truncation
};

struct WalkOptions {
  std::size_t n_walks = 0;
  LengthDistribution length;
  double reuse_skew = 0.0;     // in [0, 1]
  double zipf_exponent = 2.0;
  std::uint64_t seed = 0;
  std::size_t drives_per_vehicle = 4;
  std::string app_id = "app";
};

// Throws InfeasibleParameters for a skew outside [0, 1] or an empty FSA, and
// DeadEnd if a state without successors is reached.
std::vector<Walk> generate_walks(const Fsa& fsa, const WalkOptions& options);

struct ConvergencePoint {
  std::size_t walks_ingested = 0;
  std::size_t distinct_components = 0;
  std::size_t occurrences = 0;
  double distinct_per_occurrence = 0.0;
  std::uint64_t stored_bytes = 0;
  std::uint64_t raw_bytes = 0;
};

// Ingests the walks in order and samples store statistics after each
// checkpoint (walk counts; values beyond walks.size() are clamped and
// duplicates dropped). No walks, no rows.
std::vector<ConvergencePoint> convergence_report(const std::vector<Walk>& walks,
                                                 std::vector<std::size_t> checkpoints);
// Ten evenly spaced checkpoints ending at n_walks.
std::vector<std::size_t> default_checkpoints(std::size_t n_walks);
void write_convergence_csv(std::ostream& out, const std::vector<ConvergencePoint>& rows);

}  // namespace clickgraph
