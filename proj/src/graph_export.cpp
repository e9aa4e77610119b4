// Cypher creation scripts for the two component layouts a graph database can
// hold: component-local state nodes (variant 2) and shared transit nodes
// (variant 3). Every statement is idempotent (MERGE), so a script can be
// replayed against a database that already holds part of the data.

#include <algorithm>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "clickgraph/error.hpp"
#include "clickgraph/store.hpp"

namespace clickgraph {

namespace {

// JSON string literals are valid Cypher string literals.
std::string lit(const std::string& s) { return nlohmann::json(s).dump(); }

const char* component_label(const Component& c) { return c.is_cycle() ? "Circles" : "Paths"; }

void emit_hierarchy(std::ostringstream& out, const ComponentStore& store) {
  for (const auto& [vehicle_id, v] : store.vehicles()) {
    out << "MERGE (:Vehicle {name: " << lit(vehicle_id) << "});\n";
  }
  for (const auto& [drive_id, d] : store.drives()) {
    out << "MERGE (:Drive {name: " << lit(drive_id) << "});\n";
    out << "MATCH (v:Vehicle {name: " << lit(d.vehicle_id) << "}), (d:Drive {name: "
        << lit(drive_id) << "}) MERGE (v)-[:Drove]->(d);\n";
  }
}

std::vector<const Component*> sorted_components(const ComponentStore& store) {
  std::vector<const Component*> out;
  for (const auto& [id, c] : store.components()) out.push_back(c.get());
  std::sort(out.begin(), out.end(),
            [](const Component* a, const Component* b) { return a->id() < b->id(); });
  return out;
}

template <typename AttachFn>
void emit_occurrences(std::ostringstream& out, const ComponentStore& store, AttachFn attach) {
  for (const auto& [drive_id, d] : store.drives()) {
    for (std::uint32_t index : d.sequences) {
      const SequenceRecord& seq = store.sequences()[index];
      for (const Occurrence& occ : seq.decomposition.occurrences) {
        out << "MATCH (d:Drive {name: " << lit(drive_id) << "}), " << attach(occ)
            << " MERGE (d)-[:Has {app: " << lit(seq.app_id) << ", pos: " << occ.position
            << ", entry: " << lit(occ.entry_vertex) << ", repeat: " << occ.repeat_count
            << "}]->(c);\n";
      }
    }
  }
}

void export_component_nodes(std::ostringstream& out, const ComponentStore& store) {
  for (const Component* c : sorted_components(store)) {
    const std::string hash = lit(c->id().hex());
    const std::size_t n = c->distinct_vertex_count();
    for (std::size_t i = 0; i < n; ++i) {
      out << "MERGE (:State {compHash: " << hash << ", idx: " << i
          << ", name: " << lit(c->vertices()[i]) << "});\n";
    }
    const char* rel = c->is_cycle() ? "Circle" : "Path";
    for (std::size_t i = 0; i < c->edge_count(); ++i) {
      const std::size_t to = (i + 1) % (c->is_cycle() ? n : n + 1);
      out << "MATCH (a:State {compHash: " << hash << ", idx: " << i
          << "}), (b:State {compHash: " << hash << ", idx: " << to << "}) MERGE (a)-[:" << rel
          << " {compHash: " << hash << "}]->(b);\n";
    }
  }
  emit_hierarchy(out, store);
  emit_occurrences(out, store, [](const Occurrence& occ) {
    return "(c:State {compHash: " + lit(occ.component_id().hex()) +
           ", name: " + lit(occ.entry_vertex) + "})";
  });
}

void export_transit_nodes(std::ostringstream& out, const ComponentStore& store) {
  for (const auto& [edge, ids] : store.edge_index()) {
    out << "MERGE (t:T {start: " << lit(edge.start) << ", end: " << lit(edge.end)
        << "}) SET t.name = " << lit(edge.name()) << ";\n";
  }
  for (const Component* c : sorted_components(store)) {
    const std::string hash = lit(c->id().hex());
    const char* label = component_label(*c);
    const char* rel = c->is_cycle() ? "C" : "P";
    out << "MERGE (:" << label << " {name: " << hash << ", length: " << c->edge_count()
        << "});\n";
    const auto edges = c->edges();
    for (std::size_t i = 0; i < edges.size(); ++i) {
      out << "MATCH (c:" << label << " {name: " << hash << "}), (t:T {start: "
          << lit(edges[i].start) << ", end: " << lit(edges[i].end) << "}) MERGE (c)-[:" << rel
          << " {pos: " << i << "}]->(t);\n";
    }
  }
  emit_hierarchy(out, store);
  emit_occurrences(out, store, [](const Occurrence& occ) {
    return std::string("(c:") + component_label(*occ.component) +
           " {name: " + lit(occ.component_id().hex()) + "})";
  });
}

}  // namespace

std::string ComponentStore::export_graph_script(GraphVariant variant) const {
  std::shared_lock lock(mutex_);
  if (components_.empty()) throw Error(ErrorCode::EmptyStore, "nothing to export");
  std::ostringstream out;
  if (variant == GraphVariant::ComponentNodes) {
    export_component_nodes(out, *this);
  } else {
    export_transit_nodes(out, *this);
  }
  return out.str();
}

}  // namespace clickgraph
