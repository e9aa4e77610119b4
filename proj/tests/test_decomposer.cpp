#include <doctest.h>

#include <random>

#include "clickgraph/decomposer.hpp"
#include "clickgraph/error.hpp"
#include "test_support.hpp"

using namespace clickgraph;
using testing::states;

namespace {

const std::vector<StateId> kWorked =
    states({"S0", "S1", "S2", "S3", "S1", "S2", "S3", "S1", "S2", "S3", "S1", "S2"});

std::size_t total_cycles(const Decomposition& d) { return d.cycle_count(); }

// Path occurrences alone, in order, must lead from walk start to walk end.
bool paths_connect(const Decomposition& d, const std::vector<StateId>& w) {
  std::vector<const Component*> paths;
  for (const auto& o : d.occurrences) {
    if (!o.component->is_cycle()) paths.push_back(o.component.get());
  }
  if (paths.empty()) return w.front() == w.back();
  if (paths.front()->vertices().front() != w.front()) return false;
  if (paths.back()->vertices().back() != w.back()) return false;
  for (std::size_t i = 0; i + 1 < paths.size(); ++i) {
    if (paths[i]->vertices().back() != paths[i + 1]->vertices().front()) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("decomposer") {
  TEST_CASE("worked example splits into path, triple cycle, path") {
    const Decomposition d = decompose(kWorked);
    REQUIRE(d.occurrences.size() == 3);
    CHECK(d.occurrences[0].component->vertices() == states({"S0", "S1"}));
    CHECK_FALSE(d.occurrences[0].component->is_cycle());
    CHECK(d.occurrences[1].component->vertices() == states({"S1", "S2", "S3", "S1"}));
    CHECK(d.occurrences[1].component->is_cycle());
    CHECK(d.occurrences[1].repeat_count == 3);
    CHECK(d.occurrences[1].entry_vertex == "S1");
    CHECK(d.occurrences[2].component->vertices() == states({"S1", "S2"}));
    CHECK(describe(d) == "path(S0,S1); cycle(S1,S2,S3,S1)×3@S1; path(S1,S2)");
  }

  TEST_CASE("walk without repeats is a single path") {
    const Decomposition d = decompose(states({"A", "B", "C"}));
    REQUIRE(d.occurrences.size() == 1);
    CHECK(d.occurrences[0].component->vertices() == states({"A", "B", "C"}));
    CHECK(oracle_max_cycles(states({"A", "B", "C"})) == 0);
  }

  TEST_CASE("repeated self loop collapses into one occurrence") {
    const Decomposition d = decompose(states({"A", "A", "A"}));
    REQUIRE(d.occurrences.size() == 1);
    CHECK(d.occurrences[0].component->vertices() == states({"A", "A"}));
    CHECK(d.occurrences[0].repeat_count == 2);
    CHECK(oracle_max_cycles(states({"A", "A", "A"})) == 2);
  }

  TEST_CASE("a shared cycle entered at different vertices keeps one id") {
    const Decomposition a = decompose(states({"S0", "S3", "S1", "S2", "S3"}));
    const Decomposition b = decompose(states({"S0", "S1", "S2", "S3", "S1", "S2"}));
    auto only_cycle = [](const Decomposition& d) {
      const Occurrence* found = nullptr;
      for (const auto& o : d.occurrences) {
        if (o.component->is_cycle()) {
          CHECK(found == nullptr);
          found = &o;
        }
      }
      REQUIRE(found != nullptr);
      return *found;
    };
    const Occurrence ca = only_cycle(a);
    const Occurrence cb = only_cycle(b);
    CHECK(ca.component_id() == cb.component_id());
    CHECK(ca.entry_vertex == "S3");
    CHECK(cb.entry_vertex == "S1");
  }

  TEST_CASE("single vertex and empty walks") {
    const Decomposition d = decompose(states({"A"}));
    REQUIRE(d.occurrences.size() == 1);
    CHECK(reconstruct(d) == states({"A"}));
    CHECK_THROWS_AS(decompose(std::vector<StateId>{}), Error);
  }

  TEST_CASE("reconstruct rebuilds the worked example") {
    CHECK(reconstruct(decompose(kWorked)) == kWorked);
  }

  TEST_CASE("reconstruct rejects broken chains") {
    Decomposition d = decompose(kWorked);
    std::swap(d.occurrences[0], d.occurrences[2]);
    CHECK_THROWS_AS(reconstruct(d), Error);
  }

  TEST_CASE("oracle agrees on the worked example and enforces its bound") {
    CHECK(oracle_max_cycles(kWorked) == 3);
    std::vector<StateId> long_walk(16, "A");
    CHECK_THROWS_AS(oracle_max_cycles(long_walk), Error);
    CHECK(oracle_max_cycles(long_walk, 15) == 15);
  }

  TEST_CASE("exhaustive cross-check against the oracle over three letters") {
    std::size_t mismatches = 0;
    std::size_t checked = 0;
    for (std::size_t len = 1; len <= 8; ++len) {
      std::vector<std::size_t> digits(len, 0);
      while (true) {
        std::vector<StateId> w;
        for (auto x : digits) w.push_back(std::string(1, static_cast<char>('A' + x)));
        if (total_cycles(decompose(w)) != oracle_max_cycles(w)) ++mismatches;
        ++checked;
        std::size_t k = 0;
        while (k < len && ++digits[k] == 3) digits[k++] = 0;
        if (k == len) break;
      }
    }
    CHECK(checked == 9840);
    CHECK(mismatches == 0);
  }

  TEST_CASE("random walks round-trip and keep paths connected") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 2000; ++i) {
      const auto w = testing::random_sequence(rng, 1 + rng() % 120, 2 + rng() % 20);
      const Decomposition d = decompose(w);
      REQUIRE(reconstruct(d) == w);
      REQUIRE(paths_connect(d, w));
      for (std::size_t k = 1; k < d.occurrences.size(); ++k) {
        const auto& prev = d.occurrences[k - 1];
        const auto& cur = d.occurrences[k];
        // Merging would have absorbed an identical neighbour.
        CHECK_FALSE((prev.component_id() == cur.component_id() &&
                     prev.entry_vertex == cur.entry_vertex && cur.component->is_cycle()));
      }
    }
  }

  TEST_CASE("split segments are simple paths and closed cycles") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
      const auto w = testing::random_sequence(rng, 2 + rng() % 40, 5);
      for (const auto& seg : split_segments(w)) {
        if (seg.kind == ComponentKind::Cycle) {
          CHECK_NOTHROW(Component::cycle(seg.vertices));
        } else {
          CHECK_NOTHROW(Component::simple_path(seg.vertices));
          CHECK(seg.vertices.size() >= 2);
        }
      }
    }
  }

  TEST_CASE("subpath containment") {
    const auto p012 = Component::simple_path(states({"S0", "S1", "S2"}));
    CHECK(is_subpath(Component::simple_path(states({"S1", "S2"})), p012));
    CHECK(is_subpath(p012, p012));
    const auto abc = Component::simple_path(states({"A", "B", "C"}));
    CHECK_FALSE(is_subpath(Component::simple_path(states({"A", "C"})), abc));
    CHECK_FALSE(is_subpath(Component::simple_path(states({"B", "A"})), abc));
    CHECK(is_subpath(Component::simple_path(states({"B"})), abc));
    CHECK_FALSE(is_subpath(abc, Component::simple_path(states({"A", "B"}))));
    try {
      is_subpath(Component::cycle(states({"A", "B", "A"})), abc);
      FAIL("expected KindMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::KindMismatch);
    }
  }
}
