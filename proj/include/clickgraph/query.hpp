#pragma once

// The four analysis query families, answered on the component store. Every
// query runs against one store snapshot.

#include <cstdint>
#include <string>
#include <vector>

#include "clickgraph/store.hpp"

namespace clickgraph {

struct PathQuery {
  std::vector<StateId> states;  // length >= 2
  // Only report matches that lie inside a single stored component, instead of
  // any contiguous run of the reconstructed walk.
  bool within_component = false;
};

struct DriveMatch {
  std::string drive_id;
  std::vector<ComponentId> components;  // components the match runs through

  bool operator==(const DriveMatch&) const = default;
};

struct PathQueryResult {
  std::vector<DriveMatch> drives;             // ordered by drive_id
  std::vector<ComponentId> components;        // union over drives, ascending
  std::vector<StateId> unknown_states;        // query states absent from the store

  bool unknown_state() const { return !unknown_states.empty(); }
};

struct BetweenResult {
  std::vector<ComponentId> paths;
  std::vector<ComponentId> cycles;
  std::vector<StateId> unknown_states;

  bool operator==(const BetweenResult&) const = default;
};

struct CycleReport {
  ComponentId component_id;
  std::size_t cycle_length = 0;   // edges
  std::size_t n_drives = 0;
  std::uint64_t total_visits = 0;  // over the reported drives

  double avg_visits_per_drive() const {
    return n_drives == 0 ? 0.0 : static_cast<double>(total_visits) / static_cast<double>(n_drives);
  }
  bool operator==(const CycleReport&) const = default;
};

struct RepeatedCycleOptions {
  double min_avg_visits = 1.0;  // a drive counts when its visits exceed this
  std::size_t min_drives = 10;
  std::size_t limit = 20;       // 0 = unlimited
};

enum class ClusterMode { AllComponents, CyclesOnly };

struct Cluster {
  std::vector<ComponentId> components;  // the shared set, ascending
  std::vector<std::string> drives;      // ascending

  bool operator==(const Cluster&) const = default;
};

struct Clustering {
  std::vector<Cluster> clusters;          // size descending, then smallest drive id
  std::vector<std::string> unclustered;   // drives whose set no other drive shares

  bool operator==(const Clustering&) const = default;
};

class QueryEngine {
 public:
  explicit QueryEngine(const ComponentStore& store) : store_(store) {}

  // Drives whose walk contains the query states as a contiguous run. Throws
  // InvalidQuery for fewer than two states.
  PathQueryResult find_drives_through_path(const PathQuery& query) const;

  // Stored components holding both states. With order_aware, a must come
  // before b along the component (for cycles: from some recorded entry).
  // Throws InvalidQuery when a == b.
  BetweenResult find_paths_between(const StateId& a, const StateId& b, bool order_aware) const;

  // Cycles many drives get stuck in, longest first. Throws InvalidQuery when
  // min_drives is 0.
  std::vector<CycleReport> find_repeated_cycles(const RepeatedCycleOptions& options = {}) const;

  Clustering cluster_by_components(ClusterMode mode) const;

  // 1 - |A n B| / |A u B| over distinct component sets; 0 when both are
  // empty. Throws UnknownDrive.
  double jaccard_distance(const std::string& drive_a, const std::string& drive_b,
                          ClusterMode mode) const;

  // Distinct component ids of a drive across all of its sequences.
  std::vector<ComponentId> drive_components(const std::string& drive_id, ClusterMode mode) const;

 private:
  const ComponentStore& store_;
};

}  // namespace clickgraph
