// clickgraph command-line front end.
//
// Every subcommand writes JSON lines to stdout (or an aligned table with
// --table) and diagnostics to stderr. Exit codes: 0 ok, 2 usage, 3 data
// error, 4 store error.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "clickgraph/decomposer.hpp"
#include "clickgraph/error.hpp"
#include "clickgraph/ingest.hpp"
#include "clickgraph/pipeline.hpp"
#include "clickgraph/query.hpp"
#include "clickgraph/store.hpp"
#include "clickgraph/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace clickgraph;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitStore = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidQuery:
    case ErrorCode::InfeasibleParameters:
      return kExitUsage;
    case ErrorCode::CorruptStore:
    case ErrorCode::VersionMismatch:
    case ErrorCode::HashCollision:
    case ErrorCode::EmptyStore:
      return kExitStore;
    default:
      return kExitData;
  }
}

// Rows are collected per command and rendered at the end, so --table can
// size its columns.
class Output {
 public:
  explicit Output(bool table) : table_(table) {}

  void row(json j) {
    if (table_) {
      rows_.push_back(std::move(j));
    } else {
      std::cout << j.dump() << '\n';
    }
  }

  void flush() {
    if (!table_ || rows_.empty()) return;
    std::vector<std::string> columns;
    for (const auto& r : rows_) {
      for (auto it = r.begin(); it != r.end(); ++it) {
        if (std::find(columns.begin(), columns.end(), it.key()) == columns.end()) {
          columns.push_back(it.key());
        }
      }
    }
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> width(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) width[c] = columns[c].size();
    for (const auto& r : rows_) {
      auto& line = cells.emplace_back();
      for (std::size_t c = 0; c < columns.size(); ++c) {
        line.push_back(r.contains(columns[c]) ? cell(r[columns[c]]) : "");
        width[c] = std::max(width[c], line.back().size());
      }
    }
    auto print = [&](const std::vector<std::string>& line) {
      for (std::size_t c = 0; c < line.size(); ++c) {
        std::cout << std::left << std::setw(static_cast<int>(width[c])) << line[c]
                  << (c + 1 < line.size() ? "  " : "\n");
      }
    };
    print(columns);
    for (const auto& line : cells) print(line);
    rows_.clear();
  }

 private:
  static std::string cell(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
      std::string out;
      for (const auto& e : v) {
        if (!out.empty()) out += ',';
        out += cell(e);
      }
      return out;
    }
    return v.dump();
  }

  bool table_;
  std::vector<json> rows_;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

json ids_json(const std::vector<ComponentId>& ids) {
  json out = json::array();
  for (const auto& id : ids) out.push_back(id.hex());
  return out;
}

// A directory without a manifest is an empty store.
ComponentStore open_store(const std::string& dir) {
  if (dir.empty()) throw Error(ErrorCode::InvalidQuery, "no store given (--store or CLICKGRAPH_STORE)");
  if (!fs::exists(fs::path(dir) / "manifest.json")) return ComponentStore{};
  return ComponentStore::load(dir);
}

EventFormat parse_format(const std::string& name) {
  return name == "csv" ? EventFormat::Csv : EventFormat::Jsonl;
}

json component_json(const Component& c) {
  return {{"component_id", c.id().hex()},
          {"kind", std::string(to_string(c.kind()))},
          {"vertices", c.vertices()}};
}

json stats_json(const StoreStatistics& s) {
  return {{"n_sequences", s.n_sequences},
          {"n_drives", s.n_drives},
          {"n_vehicles", s.n_vehicles},
          {"n_distinct_cycles", s.n_distinct_cycles},
          {"n_distinct_paths", s.n_distinct_paths},
          {"cycle_edges_total", s.cycle_edges_total},
          {"cycle_vertices_total", s.cycle_vertices_total},
          {"path_edges_total", s.path_edges_total},
          {"path_vertices_total", s.path_vertices_total},
          {"n_states", s.n_states},
          {"n_transits", s.n_transits},
          {"n_occurrences", s.n_occurrences},
          {"raw_bytes", s.raw_bytes},
          {"stored_bytes", s.stored_bytes},
          {"compression_ratio", s.compression_ratio}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decompose clickstream walks into cycles and simple paths, store and query them"};
  app.require_subcommand(1);
  app.fallthrough();

  bool table = false;
  app.add_flag("--table", table, "Human-readable table instead of JSON lines");

  std::string store_dir;
  if (const char* env = std::getenv("CLICKGRAPH_STORE")) store_dir = env;
  auto add_store = [&](CLI::App* cmd) {
    cmd->add_option("--store", store_dir, "Store directory (default: $CLICKGRAPH_STORE)");
  };

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse event logs and add their walks to the store");
  std::vector<std::string> ingest_files;
  std::string ingest_format = "jsonl";
  bool collapse = false;
  ingest->add_option("files", ingest_files, "Event log files")->required()->check(CLI::ExistingFile);
  ingest->add_option("--format", ingest_format)->check(CLI::IsMember({"jsonl", "csv"}));
  ingest->add_flag("--collapse-repeats", collapse, "Drop consecutive duplicate states");
  add_store(ingest);

  auto* stats = app.add_subcommand("stats", "Store statistics");
  add_store(stats);

  // query
  auto* query = app.add_subcommand("query", "Run an analysis query");
  query->require_subcommand(1);
  query->fallthrough();
  auto* qpath = query->add_subcommand("path", "Drives whose walk passes through the given states");
  std::string path_states;
  bool within = false;
  qpath->add_option("--states", path_states, "Comma-separated states, at least two")->required();
  qpath->add_flag("--within-component", within, "Only matches inside one stored component");
  add_store(qpath);

  auto* qbetween = query->add_subcommand("between", "Stored components leading from one state to another");
  std::string from_state, to_state;
  bool unordered = false;
  qbetween->add_option("--from", from_state)->required();
  qbetween->add_option("--to", to_state)->required();
  qbetween->add_flag("--unordered", unordered, "Ignore the order of the two states");
  add_store(qbetween);

  auto* qcycles = query->add_subcommand("cycles", "Cycles that many drives repeat");
  RepeatedCycleOptions cycle_opts;
  qcycles->add_option("--min-drives", cycle_opts.min_drives)->capture_default_str();
  qcycles->add_option("--min-avg-visits", cycle_opts.min_avg_visits)->capture_default_str();
  qcycles->add_option("--limit", cycle_opts.limit, "0 for no limit")->capture_default_str();
  add_store(qcycles);

  // cluster
  auto* cluster = app.add_subcommand("cluster", "Group drives with identical component sets");
  std::string cluster_mode = "all";
  std::vector<std::string> jaccard;
  cluster->add_option("--mode", cluster_mode)->check(CLI::IsMember({"all", "cycles"}))->capture_default_str();
  cluster->add_option("--jaccard", jaccard, "Jaccard distance between two drives instead")
      ->expected(2);
  add_store(cluster);

  // export
  auto* exportc = app.add_subcommand("export", "Write a graph-database creation script");
  int variant = 3;
  std::string export_out;
  exportc->add_option("--variant", variant)->check(CLI::IsMember({2, 3}))->capture_default_str();
  exportc->add_option("--out", export_out, "Output file")->required();
  add_store(exportc);

  // simulate / convergence
  std::size_t n_states = 20, n_edges = 60, n_walks = 1000;
  double skew = 0.9, zipf = 2.0, mean_length = 50.0;
  std::size_t max_length = 500;
  std::uint64_t seed = 1;
  auto add_synth = [&](CLI::App* cmd) {
    cmd->add_option("--states", n_states)->capture_default_str();
    cmd->add_option("--edges", n_edges)->capture_default_str();
    cmd->add_option("--walks", n_walks)->capture_default_str();
    cmd->add_option("--skew", skew)->check(CLI::Range(0.0, 1.0))->capture_default_str();
    cmd->add_option("--zipf", zipf, "Zipf exponent of skewed choices")->capture_default_str();
    cmd->add_option("--mean-length", mean_length)->capture_default_str();
    cmd->add_option("--max-length", max_length)->capture_default_str();
    cmd->add_option("--seed", seed)->capture_default_str();
  };
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic FSA and walk workload");
  std::string sim_out, sim_format = "jsonl";
  add_synth(simulate);
  simulate->add_option("--out", sim_out, "Event log to write")->required();
  simulate->add_option("--format", sim_format)->check(CLI::IsMember({"jsonl", "csv"}));

  auto* convergence = app.add_subcommand("convergence", "Distinct components as walks accumulate");
  std::string conv_input, conv_format = "jsonl", conv_csv;
  std::size_t n_checkpoints = 10;
  add_synth(convergence);
  convergence->add_option("--input", conv_input, "Event log to replay instead of simulating")
      ->check(CLI::ExistingFile);
  convergence->add_option("--format", conv_format)->check(CLI::IsMember({"jsonl", "csv"}));
  convergence->add_option("--checkpoints", n_checkpoints, "Number of evenly spaced checkpoints")->capture_default_str();
  convergence->add_option("--csv", conv_csv, "Also write the report as CSV");

  auto* decomp = app.add_subcommand("decompose", "Decompose one walk and print its components");
  std::string walk_text;
  decomp->add_option("--walk", walk_text, "Comma-separated states")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  Output out(table);
  try {
    if (*ingest) {
      std::vector<LogEvent> events;
      for (const auto& file : ingest_files) {
        ParseResult parsed = parse_events_file(file, parse_format(ingest_format));
        for (const auto& r : parsed.rejects) {
          out.row({{"type", "reject"}, {"file", file}, {"line", r.line}, {"reason", r.reason}});
        }
        events.insert(events.end(), std::make_move_iterator(parsed.events.begin()),
                      std::make_move_iterator(parsed.events.end()));
      }
      const std::size_t n_events = events.size();
      const auto walks = sessionize(events, SessionizeOptions{collapse});
      ComponentStore store = open_store(store_dir);
      const IngestSummary s = ingest_walks(store, walks);
      store.persist(store_dir);
      out.row({{"type", "ingest"},
               {"events", n_events},
               {"walks", s.walks},
               {"new_sequences", s.new_sequences},
               {"new_components", s.new_components},
               {"reused_components", s.reused_components}});
    } else if (*stats) {
      const ComponentStore store = open_store(store_dir);
      out.row(stats_json(store.statistics()));
    } else if (*qpath) {
      const ComponentStore store = open_store(store_dir);
      const auto r = QueryEngine(store).find_drives_through_path({split_list(path_states), within});
      for (const auto& d : r.drives) {
        out.row({{"type", "drive"}, {"drive_id", d.drive_id}, {"components", ids_json(d.components)}});
      }
      out.row({{"type", "summary"},
               {"n_drives", r.drives.size()},
               {"components", ids_json(r.components)},
               {"unknown_states", r.unknown_states}});
    } else if (*qbetween) {
      const ComponentStore store = open_store(store_dir);
      const auto r = QueryEngine(store).find_paths_between(from_state, to_state, !unordered);
      for (const auto* ids : {&r.paths, &r.cycles}) {
        for (const auto& id : *ids) {
          json row = component_json(*store.find(id));
          row["type"] = "component";
          out.row(std::move(row));
        }
      }
      out.row({{"type", "summary"},
               {"n_paths", r.paths.size()},
               {"n_cycles", r.cycles.size()},
               {"unknown_states", r.unknown_states}});
    } else if (*qcycles) {
      const ComponentStore store = open_store(store_dir);
      for (const auto& c : QueryEngine(store).find_repeated_cycles(cycle_opts)) {
        out.row({{"component_id", c.component_id.hex()},
                 {"cycle_length", c.cycle_length},
                 {"vertices", store.find(c.component_id)->vertices()},
                 {"n_drives", c.n_drives},
                 {"total_visits", c.total_visits},
                 {"avg_visits_per_drive", c.avg_visits_per_drive()}});
      }
    } else if (*cluster) {
      const ComponentStore store = open_store(store_dir);
      const QueryEngine engine(store);
      const ClusterMode mode = cluster_mode == "cycles" ? ClusterMode::CyclesOnly : ClusterMode::AllComponents;
      if (!jaccard.empty()) {
        out.row({{"drive_a", jaccard[0]},
                 {"drive_b", jaccard[1]},
                 {"mode", cluster_mode},
                 {"distance", engine.jaccard_distance(jaccard[0], jaccard[1], mode)}});
      } else {
        const Clustering c = engine.cluster_by_components(mode);
        for (std::size_t i = 0; i < c.clusters.size(); ++i) {
          out.row({{"type", "cluster"},
                   {"cluster", i},
                   {"size", c.clusters[i].drives.size()},
                   {"drives", c.clusters[i].drives},
                   {"components", ids_json(c.clusters[i].components)}});
        }
        out.row({{"type", "unclustered"}, {"size", c.unclustered.size()}, {"drives", c.unclustered}});
      }
    } else if (*exportc) {
      const ComponentStore store = open_store(store_dir);
      const std::string script = store.export_graph_script(static_cast<GraphVariant>(variant));
      std::ofstream file(export_out, std::ios::binary | std::ios::trunc);
      if (!(file << script)) throw Error(ErrorCode::UnreadableInput, "cannot write " + export_out);
      out.row({{"out", export_out},
               {"variant", variant},
               {"statements", std::count(script.begin(), script.end(), '\n')}});
    } else if (*simulate || *convergence) {
      std::vector<Walk> walks;
      if (*convergence && !conv_input.empty()) {
        walks = sessionize(parse_events_file(conv_input, parse_format(conv_format)).events);
      } else {
        const Fsa fsa = generate_fsa(n_states, n_edges, seed);
        WalkOptions opt;
        opt.n_walks = n_walks;
        opt.length = {mean_length, max_length};
        opt.reuse_skew = skew;
        opt.zipf_exponent = zipf;
        opt.seed = seed;
        walks = generate_walks(fsa, opt);
      }
      if (*simulate) {
        std::ofstream file(sim_out, std::ios::binary | std::ios::trunc);
        write_events(file, walks, parse_format(sim_format));
        if (!file) throw Error(ErrorCode::UnreadableInput, "cannot write " + sim_out);
        std::size_t n_events = 0;
        for (const auto& w : walks) n_events += w.vertices.size();
        out.row({{"out", sim_out}, {"walks", walks.size()}, {"events", n_events}});
      } else {
        std::vector<std::size_t> checkpoints;
        for (std::size_t k = 1; k <= n_checkpoints; ++k) {
          checkpoints.push_back(std::max<std::size_t>(1, walks.size() * k / n_checkpoints));
        }
        const auto rows = convergence_report(walks, checkpoints);
        for (const auto& r : rows) {
          out.row({{"walks_ingested", r.walks_ingested},
                   {"distinct_components", r.distinct_components},
                   {"occurrences", r.occurrences},
                   {"distinct_per_occurrence", r.distinct_per_occurrence},
                   {"stored_bytes", r.stored_bytes},
                   {"raw_bytes", r.raw_bytes}});
        }
        if (!conv_csv.empty()) {
          std::ofstream file(conv_csv, std::ios::trunc);
          write_convergence_csv(file, rows);
          if (!file) throw Error(ErrorCode::UnreadableInput, "cannot write " + conv_csv);
        }
      }
    } else if (*decomp) {
      const Decomposition d = decompose(split_list(walk_text));
      json segments = json::array();
      for (const auto& o : d.occurrences) {
        segments.push_back({{"kind", std::string(to_string(o.component->kind()))},
                            {"vertices", o.component->traversal_from(o.entry_vertex)},
                            {"entry", o.entry_vertex},
                            {"repeat", o.repeat_count},
                            {"component_id", o.component_id().hex()}});
      }
      if (table) {
        for (const auto& s : segments) out.row(s);
      } else {
        out.row({{"text", describe(d)}, {"segments", segments}});
      }
    }
    out.flush();
  } catch (const Error& e) {
    out.flush();
    std::cerr << "clickgraph: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "clickgraph: " << e.what() << '\n';
    return kExitStore;
  }
  return 0;
}
