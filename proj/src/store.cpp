#include "clickgraph/store.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_set>

#include <json.hpp>

#include "clickgraph/decomposer.hpp"
#include "clickgraph/error.hpp"

namespace clickgraph {

using json = nlohmann::json;

std::string component_record(const Component& component) {
  json j;
  j["id"] = component.id().hex();
  j["kind"] = std::string(to_string(component.kind()));
  j["vertices"] = component.vertices();
  return j.dump();
}

namespace {

std::size_t digits(std::uint64_t n) {
  std::size_t d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

std::uint32_t entry_offset(const Occurrence& o) {
  if (!o.component->is_cycle()) return 0;
  return static_cast<std::uint32_t>(o.component->index_of(o.entry_vertex).value_or(0));
}

std::string record_with(const Decomposition& decomposition, const std::string& encoded) {
  json j;
  j["drive_id"] = decomposition.drive_id;
  j["app_id"] = decomposition.app_id;
  j["occ"] = encoded;
  return j.dump();
}

}  // namespace

std::string encode_occurrences(const Decomposition& decomposition,
                               const ComponentOrdinals& ordinals) {
  std::string out;
  for (const Occurrence& o : decomposition.occurrences) {
    if (!out.empty()) out += ' ';
    out += std::to_string(ordinals.at(o.component_id()));
    if (const auto k = entry_offset(o); k > 0) {
      out += '.';
      out += std::to_string(k);
    }
    if (o.repeat_count > 1) {
      out += 'x';
      out += std::to_string(o.repeat_count);
    }
  }
  return out;
}

std::size_t encoded_occurrences_size(const Decomposition& decomposition,
                                     const ComponentOrdinals& ordinals) {
  std::size_t n = decomposition.occurrences.empty() ? 0 : decomposition.occurrences.size() - 1;
  for (const Occurrence& o : decomposition.occurrences) {
    n += digits(ordinals.at(o.component_id()));
    if (const auto k = entry_offset(o); k > 0) n += 1 + digits(k);
    if (o.repeat_count > 1) n += 1 + digits(o.repeat_count);
  }
  return n;
}

std::string occurrence_record(const Decomposition& decomposition,
                              const ComponentOrdinals& ordinals) {
  return record_with(decomposition, encode_occurrences(decomposition, ordinals));
}

std::uint64_t raw_sequence_bytes(const std::string& drive_id, const std::string& app_id,
                                 const std::vector<StateId>& vertices) {
  std::uint64_t n = drive_id.size() + 1 + app_id.size() + 1;
  for (const auto& v : vertices) n += v.size() + 1;  // separator or final newline
  return n;
}

ComponentStore::ComponentStore(ComponentStore&& other) noexcept {
  *this = std::move(other);
}

ComponentStore& ComponentStore::operator=(ComponentStore&& other) noexcept {
  if (this == &other) return *this;
  std::scoped_lock lock(mutex_, other.mutex_);
  components_ = std::move(other.components_);
  sequences_ = std::move(other.sequences_);
  sequence_keys_ = std::move(other.sequence_keys_);
  drives_ = std::move(other.drives_);
  vehicles_ = std::move(other.vehicles_);
  occurrence_index_ = std::move(other.occurrence_index_);
  edge_index_ = std::move(other.edge_index_);
  state_index_ = std::move(other.state_index_);
  component_bytes_ = std::exchange(other.component_bytes_, 0);
  raw_bytes_ = std::exchange(other.raw_bytes_, 0);
  n_occurrences_ = std::exchange(other.n_occurrences_, 0);
  return *this;
}

const Component* ComponentStore::find(const ComponentId& id) const {
  auto it = components_.find(id);
  return it == components_.end() ? nullptr : it->second.get();
}

std::optional<std::uint32_t> ComponentStore::find_sequence(const std::string& drive_id,
                                                           const std::string& app_id) const {
  auto it = sequence_keys_.find({drive_id, app_id});
  if (it == sequence_keys_.end()) return std::nullopt;
  return it->second;
}

namespace {

bool same_occurrences(const Decomposition& a, const Decomposition& b) {
  if (a.occurrences.size() != b.occurrences.size()) return false;
  for (std::size_t i = 0; i < a.occurrences.size(); ++i) {
    const auto& x = a.occurrences[i];
    const auto& y = b.occurrences[i];
    if (x.component_id() != y.component_id() || x.entry_vertex != y.entry_vertex ||
        x.repeat_count != y.repeat_count) {
      return false;
    }
  }
  return true;
}

}  // namespace

InsertReport ComponentStore::insert(const Decomposition& decomposition, const DriveInfo& drive,
                                    const VehicleInfo& vehicle) {
  if (drive.drive_id != decomposition.drive_id) {
    throw Error(ErrorCode::ConflictingMetadata,
                "drive metadata is for '" + drive.drive_id + "' but the sequence belongs to '" +
                    decomposition.drive_id + "'");
  }
  if (drive.vehicle_id != vehicle.vehicle_id) {
    throw Error(ErrorCode::ConflictingMetadata,
                "drive '" + drive.drive_id + "' names vehicle '" + drive.vehicle_id +
                    "' but vehicle metadata is for '" + vehicle.vehicle_id + "'");
  }
  if (decomposition.occurrences.empty()) {
    throw Error(ErrorCode::EmptyWalk, "decomposition without occurrences");
  }
  // Validation and serialization happen outside the writer lock.
  const std::vector<StateId> walk = reconstruct(decomposition);
  const std::uint64_t raw = raw_sequence_bytes(decomposition.drive_id, decomposition.app_id, walk);
  const std::uint64_t overhead = record_with(decomposition, std::string{}).size();

  std::unique_lock lock(mutex_);
  return insert_locked(decomposition, drive, vehicle, raw, overhead);
}

InsertReport ComponentStore::insert_locked(const Decomposition& decomposition,
                                           const DriveInfo& drive, const VehicleInfo& vehicle,
                                           std::uint64_t raw_bytes, std::uint64_t record_overhead) {
  if (auto it = drives_.find(drive.drive_id);
      it != drives_.end() && it->second.vehicle_id != drive.vehicle_id) {
    throw Error(ErrorCode::ConflictingMetadata,
                "drive '" + drive.drive_id + "' already belongs to vehicle '" +
                    it->second.vehicle_id + "', got '" + drive.vehicle_id + "'");
  }

  InsertReport report;
  std::unordered_set<ComponentId> seen;

  if (auto key = sequence_keys_.find({decomposition.drive_id, decomposition.app_id});
      key != sequence_keys_.end()) {
    if (!same_occurrences(sequences_[key->second].decomposition, decomposition)) {
      throw Error(ErrorCode::ConflictingMetadata,
                  "sequence (" + decomposition.drive_id + ", " + decomposition.app_id +
                      ") is already stored with different content");
    }
    for (const auto& occ : decomposition.occurrences) {
      if (seen.insert(occ.component_id()).second) ++report.reused_components;
    }
    return report;
  }

  // Collision check before any mutation so a failed insert leaves no trace.
  for (const auto& occ : decomposition.occurrences) {
    auto it = components_.find(occ.component_id());
    if (it != components_.end() && !(*it->second == *occ.component)) {
      throw Error(ErrorCode::HashCollision,
                  "component id " + occ.component_id().hex() + " maps to different content");
    }
  }

  const auto seq_index = static_cast<std::uint32_t>(sequences_.size());
  SequenceRecord record{decomposition.drive_id, decomposition.app_id, decomposition, raw_bytes,
                        record_overhead};

  for (auto& occ : record.decomposition.occurrences) {
    const ComponentId id = occ.component_id();
    auto [it, inserted] = components_.try_emplace(id, occ.component);
    if (inserted) {
      const Component& c = *occ.component;
      component_bytes_ += component_record(c).size() + 1;
      for (auto& edge : c.edges()) edge_index_[std::move(edge)].insert(id);
      for (std::size_t i = 0; i < c.distinct_vertex_count(); ++i) {
        state_index_[c.vertices()[i]].insert(id);
      }
    }
    occ.component = it->second;
    if (seen.insert(id).second) {
      (inserted ? report.new_components : report.reused_components)++;
      occurrence_index_[id].push_back(seq_index);
    }
  }

  n_occurrences_ += record.decomposition.occurrences.size();
  raw_bytes_ += raw_bytes;
  sequences_.push_back(std::move(record));
  sequence_keys_.emplace(std::make_pair(decomposition.drive_id, decomposition.app_id), seq_index);

  auto& v = vehicles_[vehicle.vehicle_id];
  v.vehicle_id = vehicle.vehicle_id;
  for (const auto& [k, val] : vehicle.attrs) v.attrs.try_emplace(k, val);

  auto [drive_it, new_drive] = drives_.try_emplace(drive.drive_id);
  DriveRecord& d = drive_it->second;
  if (new_drive) d.vehicle_id = drive.vehicle_id;
  if (drive.start_time && (!d.start_time || *drive.start_time < *d.start_time)) {
    d.start_time = drive.start_time;
  }
  if (drive.end_time && (!d.end_time || *drive.end_time > *d.end_time)) {
    d.end_time = drive.end_time;
  }
  for (const auto& [k, val] : drive.attrs) d.attrs.try_emplace(k, val);
  d.sequences.push_back(seq_index);

  report.new_sequence = true;
  return report;
}

std::vector<const Component*> ComponentStore::ordinal_order_locked() const {
  std::vector<std::pair<std::size_t, const Component*>> ranked;
  ranked.reserve(components_.size());
  for (const auto& [id, c] : components_) {
    ranked.emplace_back(occurrence_index_.at(id).size(), c.get());
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second->id() < b.second->id();
  });
  std::vector<const Component*> out;
  out.reserve(ranked.size());
  for (const auto& [n, c] : ranked) out.push_back(c);
  return out;
}

DriveInfo drive_info_of(const Walk& walk) {
  DriveInfo drive{walk.drive_id, walk.vehicle_id, std::nullopt, std::nullopt, {}};
  if (!walk.timestamps.empty()) {
    auto [lo, hi] = std::minmax_element(walk.timestamps.begin(), walk.timestamps.end());
    drive.start_time = *lo;
    drive.end_time = *hi;
  }
  return drive;
}

InsertReport ComponentStore::insert_walk(const Walk& walk) {
  return insert(decompose(walk), drive_info_of(walk), VehicleInfo{walk.vehicle_id, {}});
}

bool ComponentStore::empty() const {
  std::shared_lock lock(mutex_);
  return components_.empty();
}

StoreStatistics ComponentStore::statistics() const {
  std::shared_lock lock(mutex_);
  return statistics_locked();
}

StoreStatistics ComponentStore::statistics_locked() const {
  StoreStatistics s;
  s.n_sequences = sequences_.size();
  s.n_drives = drives_.size();
  s.n_vehicles = vehicles_.size();
  for (const auto& [id, c] : components_) {
    if (c->is_cycle()) {
      ++s.n_distinct_cycles;
      s.cycle_edges_total += c->edge_count();
      s.cycle_vertices_total += c->distinct_vertex_count();
    } else {
      ++s.n_distinct_paths;
      s.path_edges_total += c->edge_count();
      s.path_vertices_total += c->distinct_vertex_count();
    }
  }
  s.n_states = state_index_.size();
  s.n_transits = edge_index_.size();
  s.n_occurrences = n_occurrences_;
  s.raw_bytes = raw_bytes_;
  ComponentOrdinals ordinals;
  const auto order = ordinal_order_locked();
  for (std::size_t i = 0; i < order.size(); ++i) {
    ordinals.emplace(order[i]->id(), static_cast<std::uint32_t>(i));
  }
  std::uint64_t occurrence_bytes = 0;
  for (const auto& seq : sequences_) {
    occurrence_bytes += seq.record_overhead + encoded_occurrences_size(seq.decomposition, ordinals) + 1;
  }
  s.stored_bytes = component_bytes_ + occurrence_bytes;
  s.compression_ratio =
      s.stored_bytes == 0 ? 0.0 : static_cast<double>(s.raw_bytes) / static_cast<double>(s.stored_bytes);
  return s;
}

}  // namespace clickgraph
