#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "clickgraph/model.hpp"

namespace clickgraph {

// One raw piece of a walk before deduplication: a contiguous slice of the walk
// that is either a simple path or a closed cycle (first == last).
struct Segment {
  ComponentKind kind;
  std::vector<StateId> vertices;  // as traversed, not canonicalized
};

// Splits a vertex sequence into simple paths and cycles in a single pass.
//
// A working buffer holds the current run of distinct vertices. When the next
// vertex u is already in the buffer at index i, buffer[0..i] is emitted as a
// simple path (only when i > 0) and buffer[i..] + u as a cycle; the buffer
// restarts at [u]. The trailing buffer becomes a final path unless it is just
// the junction vertex of the last cycle. A single-vertex walk yields one
// single-vertex path.
//
// Throws EmptyWalk on an empty sequence.
std::vector<Segment> split_segments(std::span<const StateId> vertices);

// split_segments + canonicalization + run-length merging of consecutive
// traversals of the same cycle entered at the same vertex.
Decomposition decompose(const Walk& walk);
Decomposition decompose(std::span<const StateId> vertices, std::string drive_id = {},
                        std::string app_id = {});

// Inverse of decompose. Throws BrokenChain when consecutive occurrences do
// not share a junction vertex or an entry vertex is not on its component.
std::vector<StateId> reconstruct(const Decomposition& decomposition);

inline constexpr std::size_t kOracleDefaultMaxEdges = 14;

// Exact maximum number of cycles over every split of the walk into simple
// paths and cycles, by exhaustive recursive enumeration. Throws TooLong when
// the walk has more than max_edges edges.
std::size_t oracle_max_cycles(std::span<const StateId> vertices,
                              std::size_t max_edges = kOracleDefaultMaxEdges);

// True iff inner's edge list is a contiguous run of outer's edge list. A
// zero-edge path is contained iff its vertex lies on outer. Throws
// KindMismatch for cycles.
bool is_subpath(const Component& inner, const Component& outer);

// Human-readable rendering: path(S0,S1); cycle(S1,S2,S3,S1)×3@S1; ...
std::string describe(const Decomposition& decomposition);

}  // namespace clickgraph
