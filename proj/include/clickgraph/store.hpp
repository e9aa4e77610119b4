#pragma once

// Content-addressed component store.
//
// Hierarchy: vehicle -> drive -> sequence (drive, app) -> ordered component
// occurrences. Components are deduplicated by ComponentId; every distinct FSA
// transit is indexed once and shared by all components that traverse it.
//
// Thread-safety: any number of readers, one writer at a time. Readers that
// need several consistent reads (the query engine) take a Snapshot, which
// holds the reader lock for its lifetime.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "clickgraph/model.hpp"

namespace clickgraph {

using Attributes = std::map<std::string, std::string>;

struct VehicleInfo {
  std::string vehicle_id;
  Attributes attrs;
};

struct DriveInfo {
  std::string drive_id;
  std::string vehicle_id;
  std::optional<Instant> start_time;
  std::optional<Instant> end_time;
  Attributes attrs;
};

// Drive record for a walk: start/end from its timestamps, no attributes.
DriveInfo drive_info_of(const Walk& walk);

struct InsertReport {
  std::size_t new_components = 0;
  std::size_t reused_components = 0;
  bool new_sequence = false;
};

struct StoreStatistics {
  std::uint64_t n_sequences = 0;         // |Q|
  std::uint64_t n_drives = 0;
  std::uint64_t n_vehicles = 0;
  std::uint64_t n_distinct_cycles = 0;   // |C|
  std::uint64_t n_distinct_paths = 0;    // |P|
  std::uint64_t cycle_edges_total = 0;   // c_e
  std::uint64_t cycle_vertices_total = 0;  // c_v
  std::uint64_t path_edges_total = 0;    // p_e
  std::uint64_t path_vertices_total = 0;   // p_v
  std::uint64_t n_states = 0;            // |V|
  std::uint64_t n_transits = 0;          // |E|
  std::uint64_t n_occurrences = 0;       // occurrence records, repeats merged
  std::uint64_t raw_bytes = 0;
  std::uint64_t stored_bytes = 0;
  double compression_ratio = 0.0;        // raw / stored, 0 when stored is 0

  bool operator==(const StoreStatistics&) const = default;
};

struct SequenceRecord {
  std::string drive_id;
  std::string app_id;
  Decomposition decomposition;
  std::uint64_t raw_bytes = 0;       // canonical raw line
  std::uint64_t record_overhead = 0; // occurrences.jsonl line minus the encoded list
};

struct DriveRecord {
  std::string vehicle_id;
  std::optional<Instant> start_time;
  std::optional<Instant> end_time;
  Attributes attrs;
  std::vector<std::uint32_t> sequences;  // indexes into sequences()
};

enum class GraphVariant { ComponentNodes = 2, TransitNodes = 3 };

inline constexpr int kStoreFormatVersion = 1;

class ComponentStore {
 public:
  class Snapshot;

  ComponentStore() = default;
  ComponentStore(ComponentStore&& other) noexcept;
  ComponentStore& operator=(ComponentStore&& other) noexcept;
  ComponentStore(const ComponentStore&) = delete;
  ComponentStore& operator=(const ComponentStore&) = delete;

  // Adds the sequence and any components not yet stored. Re-inserting an
  // identical sequence is a no-op. Throws ConflictingMetadata when the drive
  // is already bound to another vehicle or the (drive, app) sequence differs
  // from the stored one; BrokenChain when the decomposition does not
  // reconstruct; HashCollision when an id maps to different content.
  InsertReport insert(const Decomposition& decomposition, const DriveInfo& drive,
                      const VehicleInfo& vehicle);

  // decompose + insert, with drive times taken from the walk timestamps.
  InsertReport insert_walk(const Walk& walk);

  StoreStatistics statistics() const;
  bool empty() const;

  // Writes manifest.json, components.jsonl, occurrences.jsonl and
  // hierarchy.jsonl into `dir`, each replaced atomically.
  void persist(const std::filesystem::path& dir) const;
  // Throws CorruptStore (missing file, checksum mismatch, malformed record)
  // or VersionMismatch.
  static ComponentStore load(const std::filesystem::path& dir);

  // Graph-database creation script, one statement per line. Throws EmptyStore.
  std::string export_graph_script(GraphVariant variant) const;

  Snapshot snapshot() const;

  // Unlocked accessors; hold a Snapshot while using them concurrently with
  // writers.
  const std::unordered_map<ComponentId, std::shared_ptr<const Component>>& components() const {
    return components_;
  }
  const Component* find(const ComponentId& id) const;
  const std::vector<SequenceRecord>& sequences() const { return sequences_; }
  const std::map<std::string, DriveRecord>& drives() const { return drives_; }
  const std::map<std::string, VehicleInfo>& vehicles() const { return vehicles_; }
  // component id -> sequence indexes (ascending) that reference it
  const std::unordered_map<ComponentId, std::vector<std::uint32_t>>& occurrence_index() const {
    return occurrence_index_;
  }
  const std::map<TransitEdge, std::set<ComponentId>>& edge_index() const { return edge_index_; }
  const std::map<StateId, std::set<ComponentId>>& state_index() const { return state_index_; }
  std::optional<std::uint32_t> find_sequence(const std::string& drive_id,
                                             const std::string& app_id) const;

 private:
  InsertReport insert_locked(const Decomposition& decomposition, const DriveInfo& drive,
                             const VehicleInfo& vehicle, std::uint64_t raw_bytes,
                             std::uint64_t record_overhead);
  StoreStatistics statistics_locked() const;
  // Persisted order of components.jsonl: most referenced first, then by id.
  std::vector<const Component*> ordinal_order_locked() const;

  mutable std::shared_mutex mutex_;
  std::unordered_map<ComponentId, std::shared_ptr<const Component>> components_;
  std::vector<SequenceRecord> sequences_;
  std::map<std::pair<std::string, std::string>, std::uint32_t> sequence_keys_;
  std::map<std::string, DriveRecord> drives_;
  std::map<std::string, VehicleInfo> vehicles_;
  std::unordered_map<ComponentId, std::vector<std::uint32_t>> occurrence_index_;
  std::map<TransitEdge, std::set<ComponentId>> edge_index_;
  std::map<StateId, std::set<ComponentId>> state_index_;
  std::uint64_t component_bytes_ = 0;
  std::uint64_t raw_bytes_ = 0;
  std::uint64_t n_occurrences_ = 0;
};

class ComponentStore::Snapshot {
 public:
  explicit Snapshot(const ComponentStore& store) : lock_(store.mutex_), store_(&store) {}
  const ComponentStore* operator->() const { return store_; }
  const ComponentStore& operator*() const { return *store_; }

 private:
  std::shared_lock<std::shared_mutex> lock_;
  const ComponentStore* store_;
};

inline ComponentStore::Snapshot ComponentStore::snapshot() const { return Snapshot(*this); }

// Serialized forms shared by persistence and size accounting.
//
// An occurrence list is encoded as space-separated tokens, one per occurrence
// in walk order: the component's line number in components.jsonl, then
// ".k" when a cycle is entered at vertex k of its canonical rotation (k > 0),
// then "xN" when it is traversed N > 1 times in a row. Example: "0 3.2x4 17".
using ComponentOrdinals = std::unordered_map<ComponentId, std::uint32_t>;

std::string component_record(const Component& component);
std::string encode_occurrences(const Decomposition& decomposition, const ComponentOrdinals& ordinals);
std::size_t encoded_occurrences_size(const Decomposition& decomposition,
                                     const ComponentOrdinals& ordinals);
std::string occurrence_record(const Decomposition& decomposition, const ComponentOrdinals& ordinals);
// drive_id TAB app_id TAB comma-joined states, newline-terminated.
std::uint64_t raw_sequence_bytes(const std::string& drive_id, const std::string& app_id,
                                 const std::vector<StateId>& vertices);

}  // namespace clickgraph
