#include <doctest.h>

#include <random>
#include <sstream>

#include "clickgraph/error.hpp"
#include "clickgraph/ingest.hpp"
#include "test_support.hpp"

using namespace clickgraph;

namespace {

ParseResult parse(const std::string& text, EventFormat format) {
  std::istringstream in(text);
  return parse_events(in, format);
}

const char* kJsonl =
    R"({"vehicle_id":"v1","session_id":"s1","app_id":"nav","state_id":"S0","timestamp":"2024-01-01T00:00:00Z"})"
    "\n"
    R"({"vehicle_id":"v1","session_id":"s1","app_id":"nav","state_id":"S1","timestamp":"2024-01-01T00:00:02Z"})"
    "\n"
    R"({"vehicle_id":"v1","session_id":"s1","app_id":"nav","state_id":"S2, \"quoted\"","timestamp":"2024-01-01T00:00:04.5Z"})"
    "\n";

const char* kCsv =
    "vehicle_id,session_id,app_id,state_id,timestamp\n"
    "v1,s1,nav,S0,2024-01-01T00:00:00Z\n"
    "v1,s1,nav,S1,2024-01-01T00:00:02Z\n"
    "v1,s1,nav,\"S2, \"\"quoted\"\"\",2024-01-01T00:00:04.5Z\n";

LogEvent ev(std::string session, std::string app, std::string state, int second,
            std::string vehicle = "v1") {
  return {std::move(vehicle), std::move(session), std::move(app), std::move(state),
          *parse_instant("2024-01-01T00:00:00Z") + std::chrono::seconds(second)};
}

}  // namespace

TEST_SUITE("ingest") {
  TEST_CASE("three valid lines give three events") {
    const auto r = parse(kJsonl, EventFormat::Jsonl);
    CHECK(r.events.size() == 3);
    CHECK(r.rejects.empty());
    CHECK(r.events[2].state_id == "S2, \"quoted\"");
  }

  TEST_CASE("CSV and JSONL encodings parse to the same events") {
    CHECK(parse(kJsonl, EventFormat::Jsonl).events == parse(kCsv, EventFormat::Csv).events);
  }

  TEST_CASE("missing field is rejected with its line number") {
    const std::string text = std::string(kJsonl) +
                             R"({"vehicle_id":"v1","session_id":"s1","app_id":"nav","timestamp":"2024-01-01T00:00:09Z"})" "\n";
    const auto r = parse(text, EventFormat::Jsonl);
    CHECK(r.events.size() == 3);
    REQUIRE(r.rejects.size() == 1);
    CHECK(r.rejects[0].line == 4);
    CHECK(r.rejects[0].reason.find("state_id") != std::string::npos);
  }

  TEST_CASE("malformed records never abort the batch") {
    const std::string jsonl = std::string("not json\n\n") + kJsonl +
                              R"({"vehicle_id":"v1","session_id":"s1","app_id":"nav","state_id":"S9","timestamp":"noon"})" "\n[1,2]\n";
    const auto j = parse(jsonl, EventFormat::Jsonl);
    CHECK(j.events.size() == 3);
    REQUIRE(j.rejects.size() == 3);
    CHECK(j.rejects[0].line == 1);
    CHECK(j.rejects[1].line == 6);
    CHECK(j.rejects[2].line == 7);

    const std::string csv = std::string(kCsv) + "v1,s1,nav,S3\n" + "v1,s1,nav,\"open,2024-01-01T00:00:09Z\n" +
                            "more\n";
    const auto c = parse(csv, EventFormat::Csv);
    CHECK(c.events.size() == 3);
    REQUIRE(c.rejects.size() == 2);
    CHECK(c.rejects[0].line == 5);
    CHECK(c.rejects[1].line == 6);
  }

  TEST_CASE("quoted CSV field spanning lines") {
    const std::string csv =
        "state_id,timestamp,vehicle_id,session_id,app_id\n"
        "\"line\none\",2024-01-01T00:00:00Z,v1,s1,nav\n"
        "bad,when,v1,s1,nav\n";
    const auto r = parse(csv, EventFormat::Csv);
    REQUIRE(r.events.size() == 1);
    CHECK(r.events[0].state_id == "line\none");
    REQUIRE(r.rejects.size() == 1);
    CHECK(r.rejects[0].line == 4);
  }

  TEST_CASE("unreadable file") {
    CHECK_THROWS_AS(parse_events_file("/nonexistent/events.jsonl", EventFormat::Jsonl), Error);
  }

  TEST_CASE("two sessions by two apps give four walks") {
    std::vector<LogEvent> events;
    for (const char* s : {"s2", "s1"}) {
      for (const char* a : {"radio", "nav"}) {
        events.push_back(ev(s, a, "A", 1));
        events.push_back(ev(s, a, "B", 2));
      }
    }
    const auto walks = sessionize(events);
    REQUIRE(walks.size() == 4);
    CHECK(walks[0].drive_id == "s1");
    CHECK(walks[0].app_id == "nav");
    CHECK(walks[3].drive_id == "s2");
    CHECK(walks[3].app_id == "radio");
    for (const auto& w : walks) CHECK(w.vertices == testing::states({"A", "B"}));
  }

  TEST_CASE("equal timestamps keep input order") {
    const auto walks = sessionize({ev("s", "a", "X", 5), ev("s", "a", "Y", 5), ev("s", "a", "W", 1)});
    REQUIRE(walks.size() == 1);
    CHECK(walks[0].vertices == testing::states({"W", "X", "Y"}));
  }

  TEST_CASE("vehicle comes from the earliest event") {
    const auto walks = sessionize({ev("s", "a", "X", 5, "late"), ev("s", "a", "Y", 1, "early")});
    CHECK(walks[0].vehicle_id == "early");
  }

  TEST_CASE("collapse repeats") {
    const std::vector<LogEvent> events{ev("s", "a", "X", 1), ev("s", "a", "X", 2), ev("s", "a", "Y", 3),
                                       ev("s", "a", "X", 4)};
    CHECK(sessionize(events)[0].vertices == testing::states({"X", "X", "Y", "X"}));
    CHECK(sessionize(events, {true})[0].vertices == testing::states({"X", "Y", "X"}));
  }

  TEST_CASE("sessionizing is permutation invariant") {
    std::mt19937_64 rng(4);
    std::vector<LogEvent> events;
    for (int i = 0; i < 300; ++i) {
      events.push_back(ev("s" + std::to_string(rng() % 7), "app" + std::to_string(rng() % 2),
                          "S" + std::to_string(rng() % 5), i));
    }
    const auto expected = sessionize(events);
    for (int t = 0; t < 5; ++t) {
      std::shuffle(events.begin(), events.end(), rng);
      const auto walks = sessionize(events);
      REQUIRE(walks.size() == expected.size());
      for (std::size_t i = 0; i < walks.size(); ++i) {
        CHECK(walks[i].vertices == expected[i].vertices);
        CHECK(walks[i].timestamps == expected[i].timestamps);
      }
    }
  }

  TEST_CASE("event totals balance and written logs parse back") {
    std::mt19937_64 rng(8);
    std::vector<Walk> walks;
    for (int i = 0; i < 20; ++i) {
      Walk w = testing::walk("s" + std::to_string(100 + i), testing::random_sequence(rng, 1 + rng() % 10, 4),
                             "v" + std::to_string(i % 3), i % 2 ? "nav" : "media,\"x\"");
      for (std::size_t k = 0; k < w.vertices.size(); ++k) {
        w.timestamps.push_back(*parse_instant("2024-02-01T10:00:00Z") + std::chrono::seconds(k));
      }
      walks.push_back(std::move(w));
    }
    for (auto format : {EventFormat::Jsonl, EventFormat::Csv}) {
      std::ostringstream out;
      write_events(out, walks, format);
      const std::string text = out.str() + (format == EventFormat::Csv ? "x,y\n" : "{}\n");
      const auto parsed = parse(text, format);
      const auto back = sessionize(parsed.events);
      std::size_t total = 0;
      for (const auto& w : back) total += w.vertices.size();
      const std::size_t lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) -
                                (format == EventFormat::Csv ? 1 : 0);
      CHECK(lines == total + parsed.rejects.size());
      REQUIRE(back.size() == walks.size());
      for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].vertices == walks[i].vertices);
        CHECK(back[i].app_id == walks[i].app_id);
      }
    }
  }
}
