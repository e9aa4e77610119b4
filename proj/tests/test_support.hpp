#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "clickgraph/decomposer.hpp"
#include "clickgraph/model.hpp"
#include "clickgraph/query.hpp"
#include "clickgraph/store.hpp"

namespace testing {

using clickgraph::StateId;
using clickgraph::Walk;

inline std::vector<StateId> states(std::initializer_list<const char*> names) {
  return {names.begin(), names.end()};
}

inline Walk walk(std::string drive, std::vector<StateId> vertices, std::string vehicle = "v1",
                 std::string app = "app") {
  Walk w;
  w.drive_id = std::move(drive);
  w.vehicle_id = std::move(vehicle);
  w.app_id = std::move(app);
  w.vertices = std::move(vertices);
  return w;
}

// Any state sequence is a walk on the complete digraph with self loops.
inline std::vector<StateId> random_sequence(std::mt19937_64& rng, std::size_t length,
                                            std::size_t alphabet) {
  std::uniform_int_distribution<std::size_t> pick(0, alphabet - 1);
  std::vector<StateId> out;
  for (std::size_t i = 0; i < length; ++i) out.push_back("S" + std::to_string(pick(rng)));
  return out;
}

inline clickgraph::ComponentStore store_of(const std::vector<Walk>& walks) {
  clickgraph::ComponentStore store;
  for (const auto& w : walks) store.insert_walk(w);
  return store;
}

// Naive reference for path queries: scan every reconstructed walk.
inline std::vector<std::string> naive_drives_through(const clickgraph::ComponentStore& store,
                                                     const std::vector<StateId>& q) {
  std::vector<std::string> out;
  for (const auto& seq : store.sequences()) {
    const auto w = clickgraph::reconstruct(seq.decomposition);
    if (std::search(w.begin(), w.end(), q.begin(), q.end()) != w.end()) out.push_back(seq.drive_id);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<std::string> drive_ids(const clickgraph::PathQueryResult& r) {
  std::vector<std::string> out;
  for (const auto& d : r.drives) out.push_back(d.drive_id);
  return out;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("clickgraph-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
