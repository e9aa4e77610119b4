#include <doctest.h>

#include <random>

#include "clickgraph/error.hpp"
#include "clickgraph/query.hpp"
#include "test_support.hpp"

using namespace clickgraph;
using testing::states;
using testing::walk;

namespace {

std::vector<Walk> planted_path_fixture() {
  return {
      walk("d01", states({"X1", "X2", "X3"})),
      walk("d02", states({"A", "X1", "X2", "X3"})),
      walk("d03", states({"X1", "X2", "X3", "X1"})),
      walk("d04", states({"X1", "X2", "X3", "X1", "X2", "X3", "X1"})),
      walk("d05", states({"B", "X1", "X2", "X3", "C"})),
      walk("d06", states({"X1", "X2", "X3"})),
      walk("d07", states({"X1", "X2", "A"})),
      walk("d08", states({"X2", "X3", "X1"})),
      walk("d09", states({"X3", "X2", "X1"})),
      walk("d10", states({"A", "B", "C"})),
  };
}

std::vector<Walk> between_fixture() {
  return {
      walk("p1", states({"A", "B"})),
      walk("p2", states({"A", "X", "B"})),
      walk("p3", states({"A", "Y", "B"})),
      walk("p4", states({"P", "A", "B"})),
      walk("p5", states({"A", "B", "Q"})),
      walk("p6", states({"P", "A", "X", "B"})),
      walk("p7", states({"A", "Z", "B"})),
      walk("p8", states({"A", "X", "Y", "B"})),
      walk("r1", states({"B", "A"})),
      walk("c1", states({"A", "B", "C", "A"})),
  };
}

std::vector<StateId> hexagon(int laps) {
  std::vector<StateId> w{"H0"};
  for (int l = 0; l < laps; ++l) {
    for (int k = 1; k <= 6; ++k) w.push_back("H" + std::to_string(k % 6));
  }
  return w;
}

std::vector<Walk> cluster_fixture() {
  return {
      walk("d1", states({"A", "B", "A", "C"})),
      walk("d2", states({"A", "B", "A", "B", "A", "C"})),
      walk("d3", states({"A", "B", "A"})),
      walk("d4", states({"B", "A", "B"})),
      walk("d5", states({"A", "B", "A", "B", "A"})),
      walk("d6", states({"D", "E"})),
  };
}

std::vector<Walk> random_drives(std::mt19937_64& rng, std::size_t n_drives, std::size_t alphabet) {
  std::vector<Walk> out;
  for (std::size_t i = 0; i < n_drives; ++i) {
    const std::size_t apps = 1 + rng() % 2;
    for (std::size_t a = 0; a < apps; ++a) {
      out.push_back(walk("d" + std::to_string(i), testing::random_sequence(rng, 1 + rng() % 25, alphabet),
                         "v" + std::to_string(i % 5), "app" + std::to_string(a)));
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("query") {
  TEST_CASE("planted path found in six drives across four components") {
    const ComponentStore store = testing::store_of(planted_path_fixture());
    const auto r = QueryEngine(store).find_drives_through_path({states({"X1", "X2", "X3"})});
    CHECK(testing::drive_ids(r) ==
          std::vector<std::string>{"d01", "d02", "d03", "d04", "d05", "d06"});
    CHECK(r.components.size() == 4);
    CHECK(r.unknown_states.empty());
  }

  TEST_CASE("query equal to a stored component returns its occurrence drives") {
    const ComponentStore store = testing::store_of(planted_path_fixture());
    const auto c = Component::cycle(states({"X1", "X2", "X3", "X1"}));
    const auto r = QueryEngine(store).find_drives_through_path({c.vertices(), true});
    std::vector<std::string> expected;
    for (auto s : store.occurrence_index().at(c.id())) expected.push_back(store.sequences()[s].drive_id);
    CHECK(testing::drive_ids(r) == expected);
  }

  TEST_CASE("unknown states give an empty answer") {
    const ComponentStore store = testing::store_of(planted_path_fixture());
    const auto r = QueryEngine(store).find_drives_through_path({states({"X1", "NOPE"})});
    CHECK(r.drives.empty());
    CHECK(r.unknown_state());
    CHECK(r.unknown_states == states({"NOPE"}));
  }

  TEST_CASE("single-state path query is invalid") {
    const ComponentStore store = testing::store_of(planted_path_fixture());
    CHECK_THROWS_AS(QueryEngine(store).find_drives_through_path({states({"X1"})}), Error);
  }

  TEST_CASE("matches across component boundaries need the full walk") {
    const ComponentStore store = testing::store_of({walk("d1", states({"A", "B", "A", "C"}))});
    const QueryEngine engine(store);
    const auto full = engine.find_drives_through_path({states({"B", "A", "C"})});
    CHECK(testing::drive_ids(full) == std::vector<std::string>{"d1"});
    REQUIRE(full.drives.size() == 1);
    CHECK(full.drives[0].components.size() == 2);
    CHECK(engine.find_drives_through_path({states({"B", "A", "C"}), true}).drives.empty());
  }

  TEST_CASE("order-aware between reproduces the 8 versus 9 shape") {
    const ComponentStore store = testing::store_of(between_fixture());
    const QueryEngine engine(store);
    const auto ordered = engine.find_paths_between("A", "B", true);
    const auto any = engine.find_paths_between("A", "B", false);
    CHECK(ordered.paths.size() == 8);
    CHECK(ordered.cycles.size() == 1);
    CHECK(any.paths.size() == 9);
    CHECK(any.cycles.size() == 1);
    for (const auto& id : ordered.paths) {
      CHECK(std::find(any.paths.begin(), any.paths.end(), id) != any.paths.end());
    }
  }

  TEST_CASE("cycle order depends on the recorded entry vertex") {
    // Canonical (A,B,C,A). From B the walk reaches C, then A, then B.
    const ComponentStore from_b = testing::store_of({walk("d", states({"B", "C", "A", "B"}))});
    CHECK(QueryEngine(from_b).find_paths_between("A", "B", true).cycles.empty());
    CHECK(QueryEngine(from_b).find_paths_between("A", "B", false).cycles.size() == 1);
    const ComponentStore from_c = testing::store_of({walk("d", states({"C", "A", "B", "C"}))});
    CHECK(QueryEngine(from_c).find_paths_between("A", "B", true).cycles.size() == 1);
  }

  TEST_CASE("between edge cases") {
    const ComponentStore store = testing::store_of(between_fixture());
    const QueryEngine engine(store);
    const auto adj = engine.find_paths_between("Z", "B", true);
    CHECK(adj.paths.size() == 1);
    CHECK(engine.find_paths_between("Z", "B", false) == adj);
    CHECK(engine.find_paths_between("Q", "X", false).paths.empty());
    CHECK(engine.find_paths_between("A", "NOPE", true).unknown_states == states({"NOPE"}));
    CHECK_THROWS_AS(engine.find_paths_between("A", "A", true), Error);
  }

  TEST_CASE("repeated hexagon cycle in sixteen drives") {
    std::vector<Walk> walks;
    for (int i = 0; i < 16; ++i) walks.push_back(walk("h" + std::to_string(i), hexagon(2 + i % 3)));
    for (int i = 0; i < 5; ++i) walks.push_back(walk("o" + std::to_string(i), hexagon(1)));
    for (int i = 0; i < 3; ++i) walks.push_back(walk("t" + std::to_string(i), states({"T", "U", "T", "U", "T"})));
    const ComponentStore store = testing::store_of(walks);
    const auto reports = QueryEngine(store).find_repeated_cycles();
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].cycle_length == 6);
    CHECK(reports[0].n_drives == 16);
    CHECK(reports[0].total_visits == 6 * 2 + 5 * 3 + 5 * 4);
    CHECK(reports[0].avg_visits_per_drive() > 1.0);

    RepeatedCycleOptions loose;
    loose.min_drives = 3;
    const auto both = QueryEngine(store).find_repeated_cycles(loose);
    REQUIRE(both.size() == 2);
    CHECK(both[0].cycle_length > both[1].cycle_length);
    loose.limit = 1;
    CHECK(QueryEngine(store).find_repeated_cycles(loose).size() == 1);
  }

  TEST_CASE("visits are summed over separate occurrences in a drive") {
    std::vector<StateId> w = hexagon(1);
    w.push_back("Z");
    const auto again = hexagon(1);
    w.insert(w.end(), again.begin(), again.end());
    const ComponentStore store = testing::store_of({walk("d", w)});
    RepeatedCycleOptions opt;
    opt.min_drives = 1;
    const auto reports = QueryEngine(store).find_repeated_cycles(opt);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].cycle_length == 6);
    CHECK(reports[0].total_visits == 2);
  }

  TEST_CASE("single visits and path-only stores report nothing") {
    RepeatedCycleOptions opt;
    opt.min_drives = 1;
    const ComponentStore once = testing::store_of({walk("d", hexagon(1))});
    CHECK(QueryEngine(once).find_repeated_cycles(opt).empty());
    const ComponentStore paths = testing::store_of({walk("d", states({"A", "B", "C"}))});
    CHECK(QueryEngine(paths).find_repeated_cycles(opt).empty());
    opt.min_drives = 0;
    CHECK_THROWS_AS(QueryEngine(paths).find_repeated_cycles(opt), Error);
  }

  TEST_CASE("clusters of identical component sets") {
    const ComponentStore store = testing::store_of(cluster_fixture());
    const QueryEngine engine(store);
    const Clustering all = engine.cluster_by_components(ClusterMode::AllComponents);
    REQUIRE(all.clusters.size() == 2);
    CHECK(all.clusters[0].drives == std::vector<std::string>{"d3", "d4", "d5"});
    CHECK(all.clusters[1].drives == std::vector<std::string>{"d1", "d2"});
    CHECK(all.clusters[1].components.size() == 2);
    CHECK(all.unclustered == std::vector<std::string>{"d6"});

    const Clustering cycles = engine.cluster_by_components(ClusterMode::CyclesOnly);
    REQUIRE(cycles.clusters.size() == 1);
    CHECK(cycles.clusters[0].drives.size() == 5);
    CHECK(cycles.unclustered == std::vector<std::string>{"d6"});
  }

  TEST_CASE("empty store has no clusters") {
    ComponentStore store;
    const Clustering c = QueryEngine(store).cluster_by_components(ClusterMode::AllComponents);
    CHECK(c.clusters.empty());
    CHECK(c.unclustered.empty());
  }

  TEST_CASE("jaccard distance examples") {
    const ComponentStore store = testing::store_of(cluster_fixture());
    const QueryEngine engine(store);
    CHECK(engine.jaccard_distance("d1", "d2", ClusterMode::AllComponents) == 0.0);
    CHECK(engine.jaccard_distance("d1", "d3", ClusterMode::AllComponents) == doctest::Approx(0.5));
    CHECK(engine.jaccard_distance("d3", "d6", ClusterMode::AllComponents) == 1.0);
    CHECK(engine.jaccard_distance("d6", "d6", ClusterMode::CyclesOnly) == 0.0);
    try {
      engine.jaccard_distance("d1", "nobody", ClusterMode::AllComponents);
      FAIL("expected UnknownDrive");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnknownDrive);
    }
  }

  TEST_CASE("jaccard distance is a metric on random drives") {
    std::mt19937_64 rng(77);
    const ComponentStore store = testing::store_of(random_drives(rng, 60, 4));
    const QueryEngine engine(store);
    std::vector<std::string> ids;
    for (const auto& [id, d] : store.drives()) ids.push_back(id);
    for (int t = 0; t < 300; ++t) {
      const auto& x = ids[rng() % ids.size()];
      const auto& y = ids[rng() % ids.size()];
      const auto& z = ids[rng() % ids.size()];
      const auto mode = t % 2 ? ClusterMode::CyclesOnly : ClusterMode::AllComponents;
      const double xy = engine.jaccard_distance(x, y, mode);
      CHECK(xy == engine.jaccard_distance(y, x, mode));
      CHECK(engine.jaccard_distance(x, x, mode) == 0.0);
      CHECK(xy >= 0.0);
      CHECK(xy <= 1.0);
      CHECK(xy <= engine.jaccard_distance(x, z, mode) + engine.jaccard_distance(z, y, mode) + 1e-12);
    }
  }

  TEST_CASE("path queries agree with a naive scan on random stores") {
    std::mt19937_64 rng(101);
    for (int round = 0; round < 10; ++round) {
      const auto walks = random_drives(rng, 80, 3 + round % 5);
      const ComponentStore store = testing::store_of(walks);
      const QueryEngine engine(store);
      for (int k = 0; k < 40; ++k) {
        std::vector<StateId> q;
        if (k % 2 == 0) {
          const auto& w = walks[rng() % walks.size()].vertices;
          if (w.size() < 2) continue;
          const std::size_t len = 2 + rng() % std::min<std::size_t>(w.size() - 1, 5);
          const std::size_t at = rng() % (w.size() - len + 1);
          q.assign(w.begin() + static_cast<long>(at), w.begin() + static_cast<long>(at + len));
        } else {
          q = testing::random_sequence(rng, 2 + rng() % 3, 3 + round % 5);
        }
        const auto r = engine.find_drives_through_path({q});
        CHECK(testing::drive_ids(r) == testing::naive_drives_through(store, q));
      }
    }
  }

  TEST_CASE("clusters partition the drives and cycles-only coarsens") {
    std::mt19937_64 rng(55);
    const ComponentStore store = testing::store_of(random_drives(rng, 150, 3));
    const QueryEngine engine(store);
    const Clustering all = engine.cluster_by_components(ClusterMode::AllComponents);
    const Clustering cyc = engine.cluster_by_components(ClusterMode::CyclesOnly);
    for (const Clustering* c : {&all, &cyc}) {
      std::multiset<std::string> seen(c->unclustered.begin(), c->unclustered.end());
      for (const auto& cl : c->clusters) seen.insert(cl.drives.begin(), cl.drives.end());
      CHECK(seen.size() == store.drives().size());
      for (const auto& [id, d] : store.drives()) CHECK(seen.count(id) == 1);
    }
    std::map<std::string, std::size_t> cycle_cluster;
    for (std::size_t i = 0; i < cyc.clusters.size(); ++i) {
      for (const auto& d : cyc.clusters[i].drives) cycle_cluster[d] = i;
    }
    for (const auto& cl : all.clusters) {
      REQUIRE(cycle_cluster.contains(cl.drives.front()));
      for (const auto& d : cl.drives) {
        REQUIRE(cycle_cluster.contains(d));
        CHECK(cycle_cluster[d] == cycle_cluster[cl.drives.front()]);
      }
    }
  }
}
