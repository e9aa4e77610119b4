#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "clickgraph/model.hpp"

namespace clickgraph {

struct LogEvent {
  std::string vehicle_id;
  std::string session_id;  // one session is treated as one drive
  std::string app_id;
  StateId state_id;
  Instant timestamp;

  bool operator==(const LogEvent&) const = default;
};

enum class EventFormat { Jsonl, Csv };

struct RejectedLine {
  std::size_t line = 0;  // 1-based line the record starts on
  std::string reason;
};

struct ParseResult {
  std::vector<LogEvent> events;
  std::vector<RejectedLine> rejects;
};

// Parses a whole stream. Malformed records are reported, never fatal; blank
// lines are skipped. Throws UnreadableInput only when the stream fails.
ParseResult parse_events(std::istream& in, EventFormat format);
ParseResult parse_events_file(const std::filesystem::path& path, EventFormat format);

struct SessionizeOptions {
  bool collapse_repeats = false;  // drop consecutive duplicate states
};

// Groups events by (session_id, app_id), orders each group by timestamp
// (stable, so equal timestamps keep input order) and emits one walk per group
// in (session_id, app_id) order. The walk's vehicle is its earliest event's.
std::vector<Walk> sessionize(const std::vector<LogEvent>& events,
                             const SessionizeOptions& options = {});

// Inverse of sessionize for writing workloads: one event per walk vertex.
void write_events(std::ostream& out, const std::vector<Walk>& walks, EventFormat format);

}  // namespace clickgraph
