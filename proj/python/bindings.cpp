#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "clickgraph/decomposer.hpp"
#include "clickgraph/error.hpp"
#include "clickgraph/ingest.hpp"
#include "clickgraph/pipeline.hpp"
#include "clickgraph/query.hpp"
#include "clickgraph/store.hpp"
#include "clickgraph/synth.hpp"

namespace py = pybind11;
using namespace clickgraph;

namespace {

py::dict occurrence_dict(const Occurrence& o) {
  py::dict d;
  d["kind"] = std::string(to_string(o.component->kind()));
  d["component_id"] = o.component_id().hex();
  d["vertices"] = o.component->traversal_from(o.entry_vertex);
  d["entry"] = o.entry_vertex;
  d["repeat"] = o.repeat_count;
  return d;
}

py::dict stats_dict(const StoreStatistics& s) {
  py::dict d;
  d["n_sequences"] = s.n_sequences;
  d["n_drives"] = s.n_drives;
  d["n_vehicles"] = s.n_vehicles;
  d["n_distinct_cycles"] = s.n_distinct_cycles;
  d["n_distinct_paths"] = s.n_distinct_paths;
  d["cycle_edges_total"] = s.cycle_edges_total;
  d["cycle_vertices_total"] = s.cycle_vertices_total;
  d["path_edges_total"] = s.path_edges_total;
  d["path_vertices_total"] = s.path_vertices_total;
  d["n_states"] = s.n_states;
  d["n_transits"] = s.n_transits;
  d["n_occurrences"] = s.n_occurrences;
  d["raw_bytes"] = s.raw_bytes;
  d["stored_bytes"] = s.stored_bytes;
  d["compression_ratio"] = s.compression_ratio;
  return d;
}

std::vector<std::string> hex_ids(const std::vector<ComponentId>& ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(id.hex());
  return out;
}

ClusterMode cluster_mode(const std::string& name) {
  if (name == "all") return ClusterMode::AllComponents;
  if (name == "cycles") return ClusterMode::CyclesOnly;
  throw Error(ErrorCode::InvalidQuery, "mode must be 'all' or 'cycles', got '" + name + "'");
}

Walk make_walk(std::vector<StateId> states, std::string drive_id, std::string vehicle_id,
               std::string app_id) {
  Walk w;
  w.drive_id = std::move(drive_id);
  w.vehicle_id = std::move(vehicle_id);
  w.app_id = std::move(app_id);
  w.vertices = std::move(states);
  return w;
}

py::dict walk_dict(const Walk& w) {
  py::dict d;
  d["drive_id"] = w.drive_id;
  d["vehicle_id"] = w.vehicle_id;
  d["app_id"] = w.app_id;
  d["states"] = w.vertices;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Clickstream walk decomposition, component store and queries";

  py::register_exception<Error>(m, "ClickgraphError", PyExc_ValueError);

  m.def(
      "decompose",
      [](const std::vector<StateId>& states) {
        py::list out;
        for (const auto& o : decompose(states).occurrences) out.append(occurrence_dict(o));
        return out;
      },
      py::arg("states"), "Split a walk into simple paths and cycles.");
  m.def(
      "describe", [](const std::vector<StateId>& states) { return describe(decompose(states)); },
      py::arg("states"));
  m.def(
      "roundtrip",
      [](const std::vector<StateId>& states) { return reconstruct(decompose(states)); },
      py::arg("states"), "decompose followed by reconstruct; returns the rebuilt walk.");
  m.def(
      "cycle_id",
      [](std::vector<StateId> vertices) { return Component::cycle(std::move(vertices)).id().hex(); },
      py::arg("vertices"));
  m.def(
      "path_id",
      [](std::vector<StateId> vertices) {
        return Component::simple_path(std::move(vertices)).id().hex();
      },
      py::arg("vertices"));
  m.def(
      "oracle_max_cycles",
      [](const std::vector<StateId>& states, std::size_t max_edges) {
        return oracle_max_cycles(states, max_edges);
      },
      py::arg("states"), py::arg("max_edges") = kOracleDefaultMaxEdges);

  py::class_<ComponentStore>(m, "Store")
      .def(py::init<>())
      .def_static("load", &ComponentStore::load, py::arg("path"))
      .def(
          "insert_walk",
          [](ComponentStore& s, std::vector<StateId> states, std::string drive_id,
             std::string vehicle_id, std::string app_id) {
            const InsertReport r =
                s.insert_walk(make_walk(std::move(states), std::move(drive_id), std::move(vehicle_id),
                                        std::move(app_id)));
            py::dict d;
            d["new_components"] = r.new_components;
            d["reused_components"] = r.reused_components;
            d["new_sequence"] = r.new_sequence;
            return d;
          },
          py::arg("states"), py::arg("drive_id"), py::arg("vehicle_id"), py::arg("app_id") = "app")
      .def(
          "ingest_file",
          [](ComponentStore& s, const std::string& path, const std::string& format) {
            const ParseResult parsed =
                parse_events_file(path, format == "csv" ? EventFormat::Csv : EventFormat::Jsonl);
            IngestSummary summary;
            {
              py::gil_scoped_release release;
              summary = ingest_walks(s, sessionize(parsed.events));
            }
            py::dict d;
            d["walks"] = summary.walks;
            d["new_sequences"] = summary.new_sequences;
            d["new_components"] = summary.new_components;
            d["rejected"] = parsed.rejects.size();
            return d;
          },
          py::arg("path"), py::arg("format") = "jsonl")
      .def("persist", &ComponentStore::persist, py::arg("path"))
      .def("statistics", [](const ComponentStore& s) { return stats_dict(s.statistics()); })
      .def(
          "export_graph_script",
          [](const ComponentStore& s, int variant) {
            if (variant != 2 && variant != 3) {
              throw Error(ErrorCode::InvalidQuery, "variant must be 2 or 3");
            }
            return s.export_graph_script(static_cast<GraphVariant>(variant));
          },
          py::arg("variant") = 3)
      .def(
          "drives_through_path",
          [](const ComponentStore& s, const std::vector<StateId>& states, bool within_component) {
            const auto r = QueryEngine(s).find_drives_through_path({states, within_component});
            std::vector<std::string> drives;
            for (const auto& d : r.drives) drives.push_back(d.drive_id);
            return drives;
          },
          py::arg("states"), py::arg("within_component") = false)
      .def(
          "paths_between",
          [](const ComponentStore& s, const StateId& a, const StateId& b, bool order_aware) {
            const auto r = QueryEngine(s).find_paths_between(a, b, order_aware);
            py::dict d;
            d["paths"] = hex_ids(r.paths);
            d["cycles"] = hex_ids(r.cycles);
            d["unknown_states"] = r.unknown_states;
            return d;
          },
          py::arg("a"), py::arg("b"), py::arg("order_aware") = true)
      .def(
          "repeated_cycles",
          [](const ComponentStore& s, double min_avg_visits, std::size_t min_drives,
             std::size_t limit) {
            py::list out;
            for (const auto& c :
                 QueryEngine(s).find_repeated_cycles({min_avg_visits, min_drives, limit})) {
              py::dict d;
              d["component_id"] = c.component_id.hex();
              d["cycle_length"] = c.cycle_length;
              d["n_drives"] = c.n_drives;
              d["total_visits"] = c.total_visits;
              out.append(d);
            }
            return out;
          },
          py::arg("min_avg_visits") = 1.0, py::arg("min_drives") = 10, py::arg("limit") = 20)
      .def(
          "clusters",
          [](const ComponentStore& s, const std::string& mode) {
            const Clustering c = QueryEngine(s).cluster_by_components(cluster_mode(mode));
            std::vector<std::vector<std::string>> groups;
            for (const auto& cl : c.clusters) groups.push_back(cl.drives);
            return py::make_tuple(groups, c.unclustered);
          },
          py::arg("mode") = "all")
      .def(
          "jaccard_distance",
          [](const ComponentStore& s, const std::string& a, const std::string& b,
             const std::string& mode) {
            return QueryEngine(s).jaccard_distance(a, b, cluster_mode(mode));
          },
          py::arg("drive_a"), py::arg("drive_b"), py::arg("mode") = "all");

  m.def(
      "simulate",
      [](std::size_t n_states, std::size_t n_edges, std::size_t n_walks, double skew,
         std::uint64_t seed) {
        const Fsa fsa = generate_fsa(n_states, n_edges, seed);
        WalkOptions opt;
        opt.n_walks = n_walks;
        opt.reuse_skew = skew;
        opt.seed = seed;
        std::vector<Walk> walks;
        {
          py::gil_scoped_release release;
          walks = generate_walks(fsa, opt);
        }
        py::list out;
        for (const auto& w : walks) out.append(walk_dict(w));
        return out;
      },
      py::arg("states"), py::arg("edges"), py::arg("walks"), py::arg("skew") = 0.9,
      py::arg("seed") = 1);
}
