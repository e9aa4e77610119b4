#include <algorithm>
#include <charconv>
#include <fstream>
#include <mutex>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "clickgraph/decomposer.hpp"
#include "clickgraph/digest.hpp"
#include "clickgraph/error.hpp"
#include "clickgraph/store.hpp"

namespace clickgraph {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr const char* kComponents = "components.jsonl";
constexpr const char* kOccurrences = "occurrences.jsonl";
constexpr const char* kHierarchy = "hierarchy.jsonl";

void write_atomically(const fs::path& target, const std::string& content) {
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::CorruptStore, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::CorruptStore, "short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::CorruptStore, "missing store file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    if (nl > pos) lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

json attrs_json(const Attributes& attrs) {
  json j = json::object();
  for (const auto& [k, v] : attrs) j[k] = v;
  return j;
}

Attributes attrs_from(const json& j) {
  Attributes out;
  if (!j.is_object()) return out;
  for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = it.value().get<std::string>();
  return out;
}

json parse_record(std::string_view line, const char* file) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptStore, std::string("malformed record in ") + file + ": " + e.what());
  }
}

std::uint32_t parse_number(std::string_view token, std::size_t& pos) {
  std::uint32_t n = 0;
  auto [ptr, ec] = std::from_chars(token.data() + pos, token.data() + token.size(), n);
  if (ec != std::errc{} || ptr == token.data() + pos) {
    throw Error(ErrorCode::CorruptStore, "bad occurrence token '" + std::string(token) + "'");
  }
  pos = static_cast<std::size_t>(ptr - token.data());
  return n;
}

std::vector<Occurrence> decode_occurrences(std::string_view text,
                                           const std::vector<std::shared_ptr<const Component>>& table) {
  std::vector<Occurrence> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(' ', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view token = text.substr(start, end - start);
    std::size_t pos = 0;
    const std::uint32_t ordinal = parse_number(token, pos);
    if (ordinal >= table.size()) {
      throw Error(ErrorCode::CorruptStore, "occurrence references an unknown component");
    }
    const auto& c = table[ordinal];
    std::uint32_t entry = 0;
    std::uint32_t repeat = 1;
    if (pos < token.size() && token[pos] == '.') {
      ++pos;
      entry = parse_number(token, pos);
      if (!c->is_cycle() || entry == 0 || entry >= c->distinct_vertex_count()) {
        throw Error(ErrorCode::CorruptStore, "bad entry offset in '" + std::string(token) + "'");
      }
    }
    if (pos < token.size() && token[pos] == 'x') {
      ++pos;
      repeat = parse_number(token, pos);
      if (repeat < 2) throw Error(ErrorCode::CorruptStore, "bad repeat in '" + std::string(token) + "'");
    }
    if (pos != token.size()) {
      throw Error(ErrorCode::CorruptStore, "bad occurrence token '" + std::string(token) + "'");
    }
    out.push_back({c, c->vertices()[entry], repeat, static_cast<std::uint32_t>(out.size())});
    start = end + 1;
  }
  return out;
}

}  // namespace

void ComponentStore::persist(const fs::path& dir) const {
  std::shared_lock lock(mutex_);
  fs::create_directories(dir);

  const std::vector<const Component*> comps = ordinal_order_locked();
  ComponentOrdinals ordinals;
  std::string components;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    ordinals.emplace(comps[i]->id(), static_cast<std::uint32_t>(i));
    components += component_record(*comps[i]);
    components += '\n';
  }

  std::string occurrences;
  for (const auto& [key, index] : sequence_keys_) {
    occurrences += occurrence_record(sequences_[index].decomposition, ordinals);
    occurrences += '\n';
  }

  std::string hierarchy;
  for (const auto& [drive_id, d] : drives_) {
    json j;
    j["vehicle_id"] = d.vehicle_id;
    j["drive_id"] = drive_id;
    j["attrs"] = attrs_json(d.attrs);
    j["vehicle_attrs"] = attrs_json(vehicles_.at(d.vehicle_id).attrs);
    if (d.start_time) j["start_time"] = format_instant(*d.start_time);
    if (d.end_time) j["end_time"] = format_instant(*d.end_time);
    hierarchy += j.dump();
    hierarchy += '\n';
  }

  auto entry = [](const std::string& content, std::size_t records) {
    return json{{"sha256", sha256_hex(content)}, {"bytes", content.size()}, {"records", records}};
  };
  json manifest;
  manifest["format_version"] = kStoreFormatVersion;
  manifest["files"] = {{kComponents, entry(components, comps.size())},
                       {kOccurrences, entry(occurrences, sequence_keys_.size())},
                       {kHierarchy, entry(hierarchy, drives_.size())}};

  write_atomically(dir / kComponents, components);
  write_atomically(dir / kOccurrences, occurrences);
  write_atomically(dir / kHierarchy, hierarchy);
  // The manifest goes last: a crash before this point leaves the previous
  // manifest, whose checksums then reject the partially replaced files.
  write_atomically(dir / kManifest, manifest.dump(2) + "\n");
}

ComponentStore ComponentStore::load(const fs::path& dir) {
  const json manifest = parse_record(read_file(dir / kManifest), kManifest);
  if (!manifest.contains("format_version") || !manifest["format_version"].is_number_integer()) {
    throw Error(ErrorCode::CorruptStore, "manifest has no format_version");
  }
  if (manifest["format_version"].get<int>() != kStoreFormatVersion) {
    throw Error(ErrorCode::VersionMismatch,
                "store format " + manifest["format_version"].dump() + ", expected " +
                    std::to_string(kStoreFormatVersion));
  }

  auto checked = [&](const char* name) {
    std::string content = read_file(dir / name);
    const auto files = manifest.find("files");
    if (files == manifest.end() || !files->contains(name)) {
      throw Error(ErrorCode::CorruptStore, std::string("manifest does not list ") + name);
    }
    const json& meta = (*files)[name];
    if (meta.value("sha256", std::string{}) != sha256_hex(content) ||
        meta.value("bytes", std::uint64_t{0}) != content.size()) {
      throw Error(ErrorCode::CorruptStore, std::string("checksum mismatch in ") + name);
    }
    return content;
  };
  const std::string components_text = checked(kComponents);
  const std::string occurrences_text = checked(kOccurrences);
  const std::string hierarchy_text = checked(kHierarchy);

  ComponentStore store;
  try {
    std::vector<std::shared_ptr<const Component>> table;
    std::unordered_set<ComponentId> ids;
    for (auto line : split_lines(components_text)) {
      const json j = parse_record(line, kComponents);
      const auto kind = parse_component_kind(j.at("kind").get<std::string>());
      if (!kind) throw Error(ErrorCode::CorruptStore, "unknown component kind");
      auto vertices = j.at("vertices").get<std::vector<StateId>>();
      auto c = std::make_shared<const Component>(*kind == ComponentKind::Cycle
                                                     ? Component::cycle(std::move(vertices))
                                                     : Component::simple_path(std::move(vertices)));
      if (c->id().hex() != j.at("id").get<std::string>()) {
        throw Error(ErrorCode::CorruptStore, "component id does not match its content");
      }
      if (!ids.insert(c->id()).second) throw Error(ErrorCode::CorruptStore, "duplicate component");
      table.push_back(std::move(c));
    }

    std::map<std::string, std::pair<DriveInfo, VehicleInfo>> hierarchy;
    for (auto line : split_lines(hierarchy_text)) {
      const json j = parse_record(line, kHierarchy);
      DriveInfo d;
      d.drive_id = j.at("drive_id").get<std::string>();
      d.vehicle_id = j.at("vehicle_id").get<std::string>();
      d.attrs = attrs_from(j.value("attrs", json::object()));
      if (j.contains("start_time")) d.start_time = parse_instant(j["start_time"].get<std::string>());
      if (j.contains("end_time")) d.end_time = parse_instant(j["end_time"].get<std::string>());
      VehicleInfo v{d.vehicle_id, attrs_from(j.value("vehicle_attrs", json::object()))};
      std::string key = d.drive_id;
      hierarchy.emplace(std::move(key), std::make_pair(std::move(d), std::move(v)));
    }

    for (auto line : split_lines(occurrences_text)) {
      const json j = parse_record(line, kOccurrences);
      Decomposition dec;
      dec.drive_id = j.at("drive_id").get<std::string>();
      dec.app_id = j.at("app_id").get<std::string>();
      dec.occurrences = decode_occurrences(j.at("occ").get<std::string>(), table);
      auto h = hierarchy.find(dec.drive_id);
      if (h == hierarchy.end()) {
        throw Error(ErrorCode::CorruptStore, "drive '" + dec.drive_id + "' missing from hierarchy");
      }
      store.insert(dec, h->second.first, h->second.second);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptStore, std::string("malformed store record: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptStore) throw;
    throw Error(ErrorCode::CorruptStore, e.what());
  }
  return store;
}

}  // namespace clickgraph
