#include "clickgraph/query.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "clickgraph/error.hpp"

namespace clickgraph {

namespace {

struct ExpandedWalk {
  std::vector<StateId> vertices;
  std::vector<std::uint32_t> edge_owner;  // occurrence index of each walk edge
};

ExpandedWalk expand(const Decomposition& d) {
  ExpandedWalk out;
  for (std::uint32_t k = 0; k < d.occurrences.size(); ++k) {
    const Occurrence& occ = d.occurrences[k];
    const auto lap = occ.component->traversal_from(occ.entry_vertex);
    if (out.vertices.empty()) out.vertices.push_back(lap.front());
    const std::uint32_t laps = occ.component->is_cycle() ? occ.repeat_count : 1;
    for (std::uint32_t r = 0; r < laps; ++r) {
      for (std::size_t i = 1; i < lap.size(); ++i) {
        out.vertices.push_back(lap[i]);
        out.edge_owner.push_back(k);
      }
    }
  }
  return out;
}

// q runs contiguously along c (circularly for cycles).
bool runs_along(const Component& c, const std::vector<StateId>& q) {
  const auto start = c.index_of(q.front());
  if (!start) return false;
  const auto& v = c.vertices();
  const std::size_t n = c.distinct_vertex_count();
  for (std::size_t k = 1; k < q.size(); ++k) {
    const std::size_t at = *start + k;
    if (c.is_cycle()) {
      if (v[at % n] != q[k]) return false;
    } else {
      if (at >= v.size() || v[at] != q[k]) return false;
    }
  }
  return true;
}

template <typename T>
std::vector<T> sorted_unique(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<ComponentId> components_of(const ComponentStore& store, const std::string& drive_id,
                                       ClusterMode mode) {
  auto it = store.drives().find(drive_id);
  if (it == store.drives().end()) throw Error(ErrorCode::UnknownDrive, drive_id);
  std::vector<ComponentId> ids;
  for (std::uint32_t s : it->second.sequences) {
    for (const Occurrence& occ : store.sequences()[s].decomposition.occurrences) {
      if (mode == ClusterMode::AllComponents || occ.component->is_cycle()) {
        ids.push_back(occ.component_id());
      }
    }
  }
  return sorted_unique(std::move(ids));
}

std::vector<StateId> missing_states(const ComponentStore& store, const std::vector<StateId>& states) {
  std::vector<StateId> out;
  for (const auto& s : states) {
    if (!store.state_index().contains(s)) out.push_back(s);
  }
  return sorted_unique(std::move(out));
}

}  // namespace

PathQueryResult QueryEngine::find_drives_through_path(const PathQuery& query) const {
  if (query.states.size() < 2) {
    throw Error(ErrorCode::InvalidQuery, "a path query needs at least two states");
  }
  const auto snap = store_.snapshot();
  PathQueryResult result;
  result.unknown_states = missing_states(*snap, query.states);
  if (result.unknown_state()) return result;

  const auto& q = query.states;
  std::map<std::string, std::set<ComponentId>> matches;

  if (query.within_component) {
    std::set<ComponentId> hits;
    auto first = snap->edge_index().find({q[0], q[1]});
    if (first == snap->edge_index().end()) return result;
    for (const ComponentId& id : first->second) {
      if (runs_along(*snap->find(id), q)) hits.insert(id);
    }
    for (const ComponentId& id : hits) {
      for (std::uint32_t s : snap->occurrence_index().at(id)) {
        matches[snap->sequences()[s].drive_id].insert(id);
      }
    }
  } else {
    // Every walk edge belongs to exactly one occurrence, so a drive can only
    // match if, for each query edge, it owns some component with that edge.
    std::optional<std::set<std::string>> candidates;
    for (std::size_t i = 0; i + 1 < q.size(); ++i) {
      auto it = snap->edge_index().find({q[i], q[i + 1]});
      if (it == snap->edge_index().end()) return result;
      std::set<std::string> owners;
      for (const ComponentId& id : it->second) {
        for (std::uint32_t s : snap->occurrence_index().at(id)) {
          owners.insert(snap->sequences()[s].drive_id);
        }
      }
      if (!candidates) {
        candidates = std::move(owners);
      } else {
        std::set<std::string> both;
        std::set_intersection(candidates->begin(), candidates->end(), owners.begin(),
                              owners.end(), std::inserter(both, both.end()));
        candidates = std::move(both);
      }
      if (candidates->empty()) return result;
    }

    for (const std::string& drive_id : *candidates) {
      for (std::uint32_t s : snap->drives().at(drive_id).sequences) {
        const Decomposition& d = snap->sequences()[s].decomposition;
        const ExpandedWalk walk = expand(d);
        const auto& w = walk.vertices;
        if (w.size() < q.size()) continue;
        for (std::size_t start = 0; start + q.size() <= w.size(); ++start) {
          if (!std::equal(q.begin(), q.end(), w.begin() + static_cast<std::ptrdiff_t>(start))) {
            continue;
          }
          auto& comps = matches[drive_id];
          for (std::size_t e = start; e + 1 < start + q.size(); ++e) {
            comps.insert(d.occurrences[walk.edge_owner[e]].component_id());
          }
        }
      }
    }
  }

  std::set<ComponentId> all;
  for (auto& [drive_id, comps] : matches) {
    result.drives.push_back({drive_id, {comps.begin(), comps.end()}});
    all.insert(comps.begin(), comps.end());
  }
  result.components.assign(all.begin(), all.end());
  return result;
}

BetweenResult QueryEngine::find_paths_between(const StateId& a, const StateId& b,
                                              bool order_aware) const {
  if (a == b) throw Error(ErrorCode::InvalidQuery, "start and end state must differ");
  const auto snap = store_.snapshot();
  BetweenResult result;
  result.unknown_states = missing_states(*snap, {a, b});
  if (!result.unknown_states.empty()) return result;

  const auto& with_a = snap->state_index().at(a);
  const auto& with_b = snap->state_index().at(b);
  std::vector<ComponentId> both;
  std::set_intersection(with_a.begin(), with_a.end(), with_b.begin(), with_b.end(),
                        std::back_inserter(both));

  for (const ComponentId& id : both) {
    const Component& c = *snap->find(id);
    const std::size_t ia = *c.index_of(a);
    const std::size_t ib = *c.index_of(b);
    bool keep = true;
    if (order_aware && !c.is_cycle()) {
      keep = ia < ib;
    } else if (order_aware) {
      const std::size_t n = c.distinct_vertex_count();
      std::set<StateId> entries;
      for (std::uint32_t s : snap->occurrence_index().at(id)) {
        for (const Occurrence& occ : snap->sequences()[s].decomposition.occurrences) {
          if (occ.component_id() == id) entries.insert(occ.entry_vertex);
        }
      }
      keep = std::any_of(entries.begin(), entries.end(), [&](const StateId& e) {
        const std::size_t ie = *c.index_of(e);
        return (ia + n - ie) % n < (ib + n - ie) % n;
      });
    }
    if (keep) (c.is_cycle() ? result.cycles : result.paths).push_back(id);
  }
  return result;
}

std::vector<CycleReport> QueryEngine::find_repeated_cycles(
    const RepeatedCycleOptions& options) const {
  if (options.min_drives == 0) throw Error(ErrorCode::InvalidQuery, "min_drives must be >= 1");
  const auto snap = store_.snapshot();
  std::vector<CycleReport> out;
  for (const auto& [id, component] : snap->components()) {
    if (!component->is_cycle()) continue;
    std::map<std::string, std::uint64_t> visits;
    for (std::uint32_t s : snap->occurrence_index().at(id)) {
      const SequenceRecord& seq = snap->sequences()[s];
      for (const Occurrence& occ : seq.decomposition.occurrences) {
        if (occ.component_id() == id) visits[seq.drive_id] += occ.repeat_count;
      }
    }
    CycleReport report{id, component->edge_count(), 0, 0};
    for (const auto& [drive, n] : visits) {
      if (static_cast<double>(n) > options.min_avg_visits) {
        ++report.n_drives;
        report.total_visits += n;
      }
    }
    if (report.n_drives >= options.min_drives) out.push_back(report);
  }
  std::sort(out.begin(), out.end(), [](const CycleReport& x, const CycleReport& y) {
    if (x.cycle_length != y.cycle_length) return x.cycle_length > y.cycle_length;
    return x.component_id < y.component_id;
  });
  if (options.limit != 0 && out.size() > options.limit) out.resize(options.limit);
  return out;
}

std::vector<ComponentId> QueryEngine::drive_components(const std::string& drive_id,
                                                       ClusterMode mode) const {
  const auto snap = store_.snapshot();
  return components_of(*snap, drive_id, mode);
}

Clustering QueryEngine::cluster_by_components(ClusterMode mode) const {
  const auto snap = store_.snapshot();
  std::map<std::vector<ComponentId>, std::vector<std::string>> groups;
  for (const auto& [drive_id, record] : snap->drives()) {
    groups[components_of(*snap, drive_id, mode)].push_back(drive_id);
  }
  Clustering out;
  for (auto& [set, drives] : groups) {
    if (drives.size() == 1) {
      out.unclustered.push_back(std::move(drives.front()));
    } else {
      out.clusters.push_back({set, std::move(drives)});
    }
  }
  std::sort(out.clusters.begin(), out.clusters.end(), [](const Cluster& x, const Cluster& y) {
    if (x.drives.size() != y.drives.size()) return x.drives.size() > y.drives.size();
    return x.drives.front() < y.drives.front();
  });
  std::sort(out.unclustered.begin(), out.unclustered.end());
  return out;
}

double QueryEngine::jaccard_distance(const std::string& drive_a, const std::string& drive_b,
                                     ClusterMode mode) const {
  const auto snap = store_.snapshot();
  const auto a = components_of(*snap, drive_a, mode);
  const auto b = components_of(*snap, drive_b, mode);
  if (a.empty() && b.empty()) return 0.0;
  std::vector<ComponentId> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  const std::size_t unioned = a.size() + b.size() - common.size();
  return 1.0 - static_cast<double>(common.size()) / static_cast<double>(unioned);
}

}  // namespace clickgraph
