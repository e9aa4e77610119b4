#include "clickgraph/ingest.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <variant>

#include <json.hpp>

#include "clickgraph/error.hpp"

namespace clickgraph {

using json = nlohmann::json;

namespace {

constexpr std::array<const char*, 5> kFields = {"vehicle_id", "session_id", "app_id", "state_id",
                                                "timestamp"};

struct RawFields {
  std::array<std::optional<std::string>, 5> values;
};

// Builds an event from the five raw field values, or explains what is wrong.
std::variant<LogEvent, std::string> make_event(const RawFields& raw) {
  for (std::size_t i = 0; i < kFields.size(); ++i) {
    if (!raw.values[i] || raw.values[i]->empty()) {
      return std::string("missing ") + kFields[i];
    }
  }
  auto ts = parse_instant(*raw.values[4]);
  if (!ts) return "unparseable timestamp '" + *raw.values[4] + "'";
  return LogEvent{*raw.values[0], *raw.values[1], *raw.values[2], *raw.values[3], *ts};
}

void record(ParseResult& out, std::size_t line, const RawFields& raw) {
  auto ev = make_event(raw);
  if (auto* e = std::get_if<LogEvent>(&ev)) {
    out.events.push_back(std::move(*e));
  } else {
    out.rejects.push_back({line, std::get<std::string>(ev)});
  }
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

// Ids may be written as numbers; they are opaque text either way.
std::optional<std::string> as_text(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return j.dump();
  return std::nullopt;
}

void parse_jsonl(std::istream& in, ParseResult& out) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (blank(line)) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) {
      out.rejects.push_back({number, "not a JSON object"});
      continue;
    }
    RawFields raw;
    for (std::size_t i = 0; i < kFields.size(); ++i) {
      if (auto it = j.find(kFields[i]); it != j.end()) raw.values[i] = as_text(*it);
    }
    record(out, number, raw);
  }
}

// One RFC-4180 record; quoted fields may contain separators, doubled quotes
// and line breaks. Returns false at end of input.
struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t first_line = 0;
  std::string error;
};

bool read_csv_record(std::istream& in, std::size_t& line_no, CsvRecord& rec) {
  rec.fields.clear();
  rec.error.clear();
  std::string field;
  bool quoted = false;     // inside quotes
  bool was_quoted = false;  // current field started with a quote
  bool any = false;
  int ch;
  rec.first_line = line_no + 1;
  while ((ch = in.get()) != EOF) {
    any = true;
    const char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line_no;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (field.empty() && !was_quoted) {
        quoted = was_quoted = true;
      } else if (rec.error.empty()) {
        rec.error = "stray quote in field";
      }
    } else if (c == ',') {
      rec.fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (c == '\n') {
      ++line_no;
      break;
    } else if (c == '\r' && in.peek() == '\n') {
      // CRLF line ending
    } else {
      if (was_quoted && rec.error.empty()) rec.error = "text after closing quote";
      field.push_back(c);
    }
  }
  if (!any) return false;
  if (quoted) rec.error = "unterminated quoted field";
  rec.fields.push_back(std::move(field));
  return true;
}

void parse_csv(std::istream& in, ParseResult& out) {
  std::size_t line_no = 0;
  CsvRecord rec;
  std::optional<std::array<std::optional<std::size_t>, 5>> columns;
  std::size_t header_width = 0;
  while (read_csv_record(in, line_no, rec)) {
    if (rec.fields.size() == 1 && blank(rec.fields[0]) && rec.error.empty()) continue;
    if (!columns) {
      columns.emplace();
      header_width = rec.fields.size();
      for (std::size_t c = 0; c < rec.fields.size(); ++c) {
        for (std::size_t i = 0; i < kFields.size(); ++i) {
          if (rec.fields[c] == kFields[i]) (*columns)[i] = c;
        }
      }
      for (std::size_t i = 0; i < kFields.size(); ++i) {
        if (!(*columns)[i]) {
          out.rejects.push_back({rec.first_line, std::string("header lacks column ") + kFields[i]});
        }
      }
      continue;
    }
    if (!rec.error.empty()) {
      out.rejects.push_back({rec.first_line, rec.error});
      continue;
    }
    if (rec.fields.size() != header_width) {
      out.rejects.push_back({rec.first_line, "expected " + std::to_string(header_width) +
                                                 " fields, got " + std::to_string(rec.fields.size())});
      continue;
    }
    RawFields raw;
    for (std::size_t i = 0; i < kFields.size(); ++i) {
      if ((*columns)[i]) raw.values[i] = rec.fields[*(*columns)[i]];
    }
    record(out, rec.first_line, raw);
  }
}

bool needs_quotes(const std::string& s) {
  return s.find_first_of(",\"\r\n") != std::string::npos;
}

void write_csv_field(std::ostream& out, const std::string& s) {
  if (!needs_quotes(s)) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

ParseResult parse_events(std::istream& in, EventFormat format) {
  if (!in) throw Error(ErrorCode::UnreadableInput, "input stream is not readable");
  ParseResult out;
  if (format == EventFormat::Jsonl) {
    parse_jsonl(in, out);
  } else {
    parse_csv(in, out);
  }
  if (in.bad()) throw Error(ErrorCode::UnreadableInput, "read error");
  return out;
}

ParseResult parse_events_file(const std::filesystem::path& path, EventFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnreadableInput, "cannot open " + path.string());
  return parse_events(in, format);
}

std::vector<Walk> sessionize(const std::vector<LogEvent>& events, const SessionizeOptions& options) {
  std::map<std::pair<std::string, std::string>, std::vector<const LogEvent*>> groups;
  for (const LogEvent& e : events) groups[{e.session_id, e.app_id}].push_back(&e);

  std::vector<Walk> walks;
  walks.reserve(groups.size());
  for (auto& [key, group] : groups) {
    std::stable_sort(group.begin(), group.end(),
                     [](const LogEvent* a, const LogEvent* b) { return a->timestamp < b->timestamp; });
    Walk w;
    w.drive_id = key.first;
    w.app_id = key.second;
    w.vehicle_id = group.front()->vehicle_id;
    for (const LogEvent* e : group) {
      if (options.collapse_repeats && !w.vertices.empty() && w.vertices.back() == e->state_id) {
        continue;
      }
      w.vertices.push_back(e->state_id);
      w.timestamps.push_back(e->timestamp);
    }
    walks.push_back(std::move(w));
  }
  return walks;
}

void write_events(std::ostream& out, const std::vector<Walk>& walks, EventFormat format) {
  if (format == EventFormat::Csv) out << "vehicle_id,session_id,app_id,state_id,timestamp\n";
  for (const Walk& w : walks) {
    for (std::size_t i = 0; i < w.vertices.size(); ++i) {
      const std::string ts = i < w.timestamps.size() ? format_instant(w.timestamps[i])
                                                     : format_instant(Instant{});
      if (format == EventFormat::Jsonl) {
        json j;
        j["vehicle_id"] = w.vehicle_id;
        j["session_id"] = w.drive_id;
        j["app_id"] = w.app_id;
        j["state_id"] = w.vertices[i];
        j["timestamp"] = ts;
        out << j.dump() << '\n';
      } else {
        write_csv_field(out, w.vehicle_id);
        out << ',';
        write_csv_field(out, w.drive_id);
        out << ',';
        write_csv_field(out, w.app_id);
        out << ',';
        write_csv_field(out, w.vertices[i]);
        out << ',' << ts << '\n';
      }
    }
  }
}

}  // namespace clickgraph
