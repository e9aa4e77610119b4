#include "clickgraph/decomposer.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "clickgraph/error.hpp"

namespace clickgraph {

std::vector<Segment> split_segments(std::span<const StateId> vertices) {
  if (vertices.empty()) throw Error(ErrorCode::EmptyWalk, "walk has no vertices");

  std::vector<Segment> out;
  if (vertices.size() == 1) {
    out.push_back({ComponentKind::SimplePath, {vertices.front()}});
    return out;
  }

  // The buffer is always the slice vertices[begin..i); `where` maps each of its
  // vertices to its walk index.
  std::size_t begin = 0;
  std::unordered_map<std::string_view, std::size_t> where;
  where.emplace(vertices[0], 0);

  auto slice = [&](std::size_t first, std::size_t last) {
    return std::vector<StateId>(vertices.begin() + static_cast<std::ptrdiff_t>(first),
                                vertices.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  };

  for (std::size_t i = 1; i < vertices.size(); ++i) {
    const StateId& u = vertices[i];
    auto hit = where.find(u);
    if (hit == where.end()) {
      where.emplace(u, i);
      continue;
    }
    const std::size_t j = hit->second;
    if (j > begin) out.push_back({ComponentKind::SimplePath, slice(begin, j)});
    out.push_back({ComponentKind::Cycle, slice(j, i)});
    begin = i;
    where.clear();
    where.emplace(u, i);
  }

  if (begin + 1 < vertices.size()) {
    out.push_back({ComponentKind::SimplePath, slice(begin, vertices.size() - 1)});
  }
  return out;
}

Decomposition decompose(std::span<const StateId> vertices, std::string drive_id,
                        std::string app_id) {
  Decomposition d;
  d.drive_id = std::move(drive_id);
  d.app_id = std::move(app_id);

  for (auto& seg : split_segments(vertices)) {
    StateId entry = seg.vertices.front();
    if (seg.kind == ComponentKind::Cycle) {
      auto cycle = std::make_shared<const Component>(canonicalize_cycle(seg.vertices));
      if (!d.occurrences.empty()) {
        Occurrence& last = d.occurrences.back();
        if (last.component->is_cycle() && last.component_id() == cycle->id() &&
            last.entry_vertex == entry) {
          ++last.repeat_count;
          continue;
        }
      }
      d.occurrences.push_back({std::move(cycle), std::move(entry), 1, 0});
    } else {
      auto path = std::make_shared<const Component>(Component::simple_path(std::move(seg.vertices)));
      d.occurrences.push_back({std::move(path), std::move(entry), 1, 0});
    }
  }
  for (std::size_t i = 0; i < d.occurrences.size(); ++i) {
    d.occurrences[i].position = static_cast<std::uint32_t>(i);
  }
  return d;
}

Decomposition decompose(const Walk& walk) {
  return decompose(walk.vertices, walk.drive_id, walk.app_id);
}

std::vector<StateId> reconstruct(const Decomposition& decomposition) {
  std::vector<StateId> out;
  for (const Occurrence& occ : decomposition.occurrences) {
    const Component& c = *occ.component;
    if (!c.is_cycle() && c.vertices().front() != occ.entry_vertex) {
      throw Error(ErrorCode::BrokenChain, "path occurrence at position " +
                                              std::to_string(occ.position) +
                                              " does not enter at its first vertex");
    }
    if (occ.repeat_count == 0) {
      throw Error(ErrorCode::BrokenChain, "occurrence with zero repeats");
    }
    const std::vector<StateId> lap = c.traversal_from(occ.entry_vertex);
    if (out.empty()) {
      out.push_back(lap.front());
    } else if (out.back() != lap.front()) {
      throw Error(ErrorCode::BrokenChain, "occurrence at position " +
                                              std::to_string(occ.position) + " starts at '" +
                                              lap.front() + "' but the walk is at '" +
                                              out.back() + "'");
    }
    const std::uint32_t laps = c.is_cycle() ? occ.repeat_count : 1;
    for (std::uint32_t k = 0; k < laps; ++k) {
      out.insert(out.end(), lap.begin() + 1, lap.end());
    }
  }
  return out;
}

namespace {

bool is_simple_slice(std::span<const StateId> s) {
  std::unordered_set<std::string_view> seen;
  for (const auto& v : s) {
    if (!seen.insert(v).second) return false;
  }
  return true;
}

// Best cycle count for the suffix starting at vertex index `from`. Every
// segment boundary choice is enumerated.
std::size_t enumerate_splits(std::span<const StateId> w, std::size_t from) {
  if (from + 1 >= w.size()) return 0;
  std::size_t best = 0;
  bool any = false;
  for (std::size_t to = from + 1; to < w.size(); ++to) {
    const auto seg = w.subspan(from, to - from + 1);
    const bool path = is_simple_slice(seg);
    const bool cycle = seg.front() == seg.back() && is_simple_slice(seg.first(seg.size() - 1));
    if (!path && !cycle) continue;
    const std::size_t rest = enumerate_splits(w, to) + (cycle ? 1 : 0);
    if (!any || rest > best) best = rest;
    any = true;
  }
  return best;
}

}  // namespace

std::size_t oracle_max_cycles(std::span<const StateId> vertices, std::size_t max_edges) {
  if (vertices.empty()) throw Error(ErrorCode::EmptyWalk, "walk has no vertices");
  if (vertices.size() - 1 > max_edges) {
    throw Error(ErrorCode::TooLong, "walk has " + std::to_string(vertices.size() - 1) +
                                        " edges, oracle bound is " + std::to_string(max_edges));
  }
  return enumerate_splits(vertices, 0);
}

bool is_subpath(const Component& inner, const Component& outer) {
  if (inner.is_cycle() || outer.is_cycle()) {
    throw Error(ErrorCode::KindMismatch, "is_subpath expects two simple paths");
  }
  const auto& a = inner.vertices();
  const auto& b = outer.vertices();
  if (a.size() == 1) return outer.contains(a.front());
  // Vertices of a simple path are distinct, so the first vertex fixes the only
  // possible alignment.
  const auto start = outer.index_of(a.front());
  if (!start || *start + a.size() > b.size()) return false;
  return std::equal(a.begin(), a.end(), b.begin() + static_cast<std::ptrdiff_t>(*start));
}

std::string describe(const Decomposition& decomposition) {
  std::string out;
  for (const Occurrence& occ : decomposition.occurrences) {
    if (!out.empty()) out += "; ";
    const Component& c = *occ.component;
    out += c.is_cycle() ? "cycle(" : "path(";
    const auto lap = c.traversal_from(occ.entry_vertex);
    for (std::size_t i = 0; i < lap.size(); ++i) {
      if (i) out += ',';
      out += lap[i];
    }
    out += ')';
    if (c.is_cycle()) {
      out += "×" + std::to_string(occ.repeat_count) + "@" + occ.entry_vertex;
    }
  }
  return out;
}

}  // namespace clickgraph
