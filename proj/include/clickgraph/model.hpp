#pragma once

// Vocabulary shared by every clickgraph module: FSA states and transits,
// walks (one per drive and application), and the deduplicated components a
// walk is split into.
//
// Component identity:
//   - a simple path is identified by its ordered vertex list;
//   - a cycle is identified by its edge set, so every rotation of a cycle maps
//     to one canonical rotation (starting at the lexicographically smallest
//     vertex) and therefore to one ComponentId.
// The entry vertex a walk used to enter a cycle is kept on the Occurrence.

#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace clickgraph {

using StateId = std::string;
using Instant = std::chrono::sys_time<std::chrono::microseconds>;

struct TransitEdge {
  StateId start;
  StateId end;

  auto operator<=>(const TransitEdge&) const = default;
  bool operator==(const TransitEdge&) const = default;

  // Display name used by graph exports ("S0_S1").
  std::string name() const { return start + "_" + end; }
};

struct Walk {
  std::string drive_id;
  std::string vehicle_id;
  std::string app_id;
  std::vector<StateId> vertices;
  std::vector<Instant> timestamps;  // empty, or same length as vertices

  std::size_t edge_count() const {
    return vertices.empty() ? 0 : vertices.size() - 1;
  }
};

enum class ComponentKind : std::uint8_t { SimplePath, Cycle };

std::string_view to_string(ComponentKind kind);
std::optional<ComponentKind> parse_component_kind(std::string_view text);

// Truncated SHA-256 digest of a component's canonical encoding.
class ComponentId {
 public:
  constexpr ComponentId() = default;
  constexpr explicit ComponentId(std::uint64_t value) : value_(value) {}

  constexpr std::uint64_t value() const { return value_; }
  std::string hex() const;
  static std::optional<ComponentId> from_hex(std::string_view text);

  auto operator<=>(const ComponentId&) const = default;

 private:
  std::uint64_t value_ = 0;
};

ComponentId component_hash(ComponentKind kind, std::span<const StateId> vertices);

class Component {
 public:
  // Throws NotACycle when the vertex list is not a simple path.
  static Component simple_path(std::vector<StateId> vertices);
  // Accepts any rotation; stores the canonical one. Throws NotACycle.
  static Component cycle(std::vector<StateId> vertices);

  ComponentKind kind() const { return kind_; }
  bool is_cycle() const { return kind_ == ComponentKind::Cycle; }
  const std::vector<StateId>& vertices() const { return vertices_; }
  const ComponentId& id() const { return id_; }

  std::size_t edge_count() const { return vertices_.size() - 1; }
  // Distinct vertices: the closing vertex of a cycle is not counted twice.
  std::size_t distinct_vertex_count() const {
    return is_cycle() ? vertices_.size() - 1 : vertices_.size();
  }
  std::vector<TransitEdge> edges() const;
  bool contains(const StateId& state) const;
  std::optional<std::size_t> index_of(const StateId& state) const;

  // For a cycle: the closed vertex list starting and ending at `entry`.
  // For a path: the stored vertices (entry must be the first vertex).
  std::vector<StateId> traversal_from(const StateId& entry) const;

  bool operator==(const Component& other) const {
    return kind_ == other.kind_ && vertices_ == other.vertices_;
  }

 private:
  friend Component canonicalize_cycle(std::span<const StateId> vertices);
  Component(ComponentKind kind, std::vector<StateId> vertices);

  ComponentKind kind_;
  std::vector<StateId> vertices_;
  ComponentId id_;
};

// Rotation starting at the smallest vertex. Throws NotACycle when first != last
// or an interior vertex repeats.
Component canonicalize_cycle(std::span<const StateId> vertices);

struct Occurrence {
  std::shared_ptr<const Component> component;
  StateId entry_vertex;
  std::uint32_t repeat_count = 1;
  std::uint32_t position = 0;

  const ComponentId& component_id() const { return component->id(); }
};

struct Decomposition {
  std::string drive_id;
  std::string app_id;
  std::vector<Occurrence> occurrences;

  // Number of cycle traversals, counting repeats.
  std::size_t cycle_count() const;
};

// ISO-8601 UTC instants, e.g. 2021-03-04T05:06:07.250Z or ...+01:00.
std::optional<Instant> parse_instant(std::string_view text);
std::string format_instant(Instant instant);

}  // namespace clickgraph

template <>
struct std::hash<clickgraph::ComponentId> {
  std::size_t operator()(const clickgraph::ComponentId& id) const noexcept {
    return static_cast<std::size_t>(id.value());
  }
};

template <>
struct std::hash<clickgraph::TransitEdge> {
  std::size_t operator()(const clickgraph::TransitEdge& e) const noexcept {
    std::size_t h = std::hash<std::string>{}(e.start);
    return h ^ (std::hash<std::string>{}(e.end) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  }
};
