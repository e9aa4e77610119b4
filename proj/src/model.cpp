#include "clickgraph/model.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <unordered_set>

#include "clickgraph/digest.hpp"
#include "clickgraph/error.hpp"

namespace clickgraph {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotACycle: return "NotACycle";
    case ErrorCode::NotASimplePath: return "NotASimplePath";
    case ErrorCode::EmptyWalk: return "EmptyWalk";
    case ErrorCode::BrokenChain: return "BrokenChain";
    case ErrorCode::TooLong: return "TooLong";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::ConflictingMetadata: return "ConflictingMetadata";
    case ErrorCode::HashCollision: return "HashCollision";
    case ErrorCode::CorruptStore: return "CorruptStore";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::EmptyStore: return "EmptyStore";
    case ErrorCode::UnknownDrive: return "UnknownDrive";
    case ErrorCode::UnreadableInput: return "UnreadableInput";
    case ErrorCode::InfeasibleParameters: return "InfeasibleParameters";
    case ErrorCode::DeadEnd: return "DeadEnd";
  }
  return "Unknown";
}

std::string_view to_string(ComponentKind kind) {
  return kind == ComponentKind::Cycle ? "cycle" : "path";
}

std::optional<ComponentKind> parse_component_kind(std::string_view text) {
  if (text == "cycle") return ComponentKind::Cycle;
  if (text == "path") return ComponentKind::SimplePath;
  return std::nullopt;
}

std::string ComponentId::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value_));
  return std::string(buf, 16);
}

std::optional<ComponentId> ComponentId::from_hex(std::string_view text) {
  if (text.size() != 16) return std::nullopt;
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, 16);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return ComponentId(value);
}

// Preimage: kind tag, vertex count, then each label length-prefixed (u64 LE).
ComponentId component_hash(ComponentKind kind, std::span<const StateId> vertices) {
  std::string preimage;
  std::size_t total = 9;
  for (const auto& v : vertices) total += 8 + v.size();
  preimage.reserve(total);
  auto put_u64 = [&](std::uint64_t n) {
    for (int i = 0; i < 8; ++i) preimage.push_back(static_cast<char>((n >> (8 * i)) & 0xff));
  };
  preimage.push_back(kind == ComponentKind::Cycle ? 'C' : 'P');
  put_u64(vertices.size());
  for (const auto& v : vertices) {
    put_u64(v.size());
    preimage.append(v);
  }
  const Sha256 digest = sha256(preimage);
  std::uint64_t value = 0;
  for (int i = 0; i < 8; ++i) value = (value << 8) | digest[i];
  return ComponentId(value);
}

namespace {

bool all_distinct(std::span<const StateId> vertices) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(vertices.size());
  for (const auto& v : vertices) {
    if (!seen.insert(v).second) return false;
  }
  return true;
}

}  // namespace

Component::Component(ComponentKind kind, std::vector<StateId> vertices)
    : kind_(kind), vertices_(std::move(vertices)), id_(component_hash(kind_, vertices_)) {}

Component Component::simple_path(std::vector<StateId> vertices) {
  if (vertices.empty()) throw Error(ErrorCode::EmptyWalk, "simple path without vertices");
  if (!all_distinct(vertices)) {
    throw Error(ErrorCode::NotASimplePath, "simple path repeats a vertex");
  }
  return Component(ComponentKind::SimplePath, std::move(vertices));
}

Component Component::cycle(std::vector<StateId> vertices) {
  return canonicalize_cycle(vertices);
}

Component canonicalize_cycle(std::span<const StateId> vertices) {
  if (vertices.size() < 2) {
    throw Error(ErrorCode::NotACycle, "a cycle needs at least one edge");
  }
  if (vertices.front() != vertices.back()) {
    throw Error(ErrorCode::NotACycle, "first vertex '" + vertices.front() +
                                          "' differs from last vertex '" +
                                          vertices.back() + "'");
  }
  const auto body = vertices.first(vertices.size() - 1);
  if (!all_distinct(body)) {
    throw Error(ErrorCode::NotACycle, "interior vertex repeats");
  }
  const auto smallest = std::min_element(body.begin(), body.end());
  const std::size_t start = static_cast<std::size_t>(smallest - body.begin());
  std::vector<StateId> canonical;
  canonical.reserve(vertices.size());
  for (std::size_t i = 0; i < body.size(); ++i) {
    canonical.push_back(body[(start + i) % body.size()]);
  }
  canonical.push_back(canonical.front());
  return Component(ComponentKind::Cycle, std::move(canonical));
}

std::vector<TransitEdge> Component::edges() const {
  std::vector<TransitEdge> out;
  out.reserve(edge_count());
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
    out.push_back({vertices_[i], vertices_[i + 1]});
  }
  return out;
}

bool Component::contains(const StateId& state) const {
  return index_of(state).has_value();
}

std::optional<std::size_t> Component::index_of(const StateId& state) const {
  const std::size_t n = distinct_vertex_count();
  for (std::size_t i = 0; i < n; ++i) {
    if (vertices_[i] == state) return i;
  }
  return std::nullopt;
}

std::vector<StateId> Component::traversal_from(const StateId& entry) const {
  if (!is_cycle()) return vertices_;
  const auto start = index_of(entry);
  if (!start) {
    throw Error(ErrorCode::BrokenChain,
                "entry vertex '" + entry + "' is not on cycle " + id_.hex());
  }
  const std::size_t n = distinct_vertex_count();
  std::vector<StateId> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out.push_back(vertices_[(*start + i) % n]);
  return out;
}

std::size_t Decomposition::cycle_count() const {
  std::size_t total = 0;
  for (const auto& occ : occurrences) {
    if (occ.component->is_cycle()) total += occ.repeat_count;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Instants

namespace {

bool parse_fixed(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
  return ec == std::errc{} && ptr == text.data() + pos + len;
}

}  // namespace

std::optional<Instant> parse_instant(std::string_view text) {
  using namespace std::chrono;
  int y, mo, d, h, mi, s;
  if (text.size() < 20) return std::nullopt;
  if (!parse_fixed(text, 0, 4, y) || text[4] != '-' || !parse_fixed(text, 5, 2, mo) ||
      text[7] != '-' || !parse_fixed(text, 8, 2, d) ||
      (text[10] != 'T' && text[10] != 't' && text[10] != ' ') ||
      !parse_fixed(text, 11, 2, h) || text[13] != ':' || !parse_fixed(text, 14, 2, mi) ||
      text[16] != ':' || !parse_fixed(text, 17, 2, s)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;

  std::size_t pos = 19;
  std::int64_t micros = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 6) micros = micros * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) return std::nullopt;
    for (int i = digits; i < 6; ++i) micros *= 10;
  }

  std::int64_t offset_minutes = 0;
  if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
    ++pos;
  } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    const int sign = text[pos] == '-' ? -1 : 1;
    int oh, om;
    if (!parse_fixed(text, pos + 1, 2, oh) || pos + 3 >= text.size() ||
        text[pos + 3] != ':' || !parse_fixed(text, pos + 4, 2, om)) {
      return std::nullopt;
    }
    offset_minutes = sign * (oh * 60 + om);
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != text.size()) return std::nullopt;

  const auto tp = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} +
                  microseconds{micros} - minutes{offset_minutes};
  return time_point_cast<microseconds>(tp);
}

std::string format_instant(Instant instant) {
  using namespace std::chrono;
  const auto day_point = floor<days>(instant);
  const year_month_day ymd{day_point};
  auto rest = instant - day_point;
  const auto h = duration_cast<hours>(rest);
  rest -= h;
  const auto mi = duration_cast<minutes>(rest);
  rest -= mi;
  const auto s = duration_cast<seconds>(rest);
  rest -= s;
  const auto us = rest.count();
  char buf[40];
  if (us == 0) {
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                  static_cast<int>(mi.count()), static_cast<int>(s.count()));
  } else {
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%06lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                  static_cast<int>(mi.count()), static_cast<int>(s.count()),
                  static_cast<long long>(us));
  }
  return buf;
}

}  // namespace clickgraph
