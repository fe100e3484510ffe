#include "stancelab/manifest.hpp"

#include <ctime>
#include <filesystem>

#include "json_util.hpp"
#include "stancelab/store.hpp"

namespace stancelab {

std::string library_version() { return "0.1.0"; }

ManifestEntry manifest_entry(const std::string& path) {
  ManifestEntry e;
  e.path = path;
  const std::string content = detail::read_text_file(path);
  e.hash = hash_hex(fnv1a64(content));
  e.bytes = content.size();
  return e;
}

RunManifest make_manifest(const std::string& verb, const std::vector<std::string>& args) {
  RunManifest m;
  m.verb = verb;
  m.args = args;
  m.tool_version = library_version();
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  m.created_utc = buf;
  return m;
}

void add_input(RunManifest& manifest, const std::string& path) {
  manifest.inputs.push_back(manifest_entry(path));
}

void add_output(RunManifest& manifest, const std::string& path) {
  manifest.outputs.push_back(manifest_entry(path));
}

namespace {

detail::Json entries_to_json(const std::vector<ManifestEntry>& entries) {
  detail::Json arr = detail::Json::array();
  for (const auto& e : entries) {
    arr.push_back({{"path", e.path}, {"hash", e.hash}, {"bytes", e.bytes}});
  }
  return arr;
}

std::vector<ManifestEntry> entries_from_json(const detail::Json& arr,
                                             const std::string& path) {
  std::vector<ManifestEntry> out;
  for (const auto& j : arr) {
    ManifestEntry e;
    e.path = detail::require(j, "path", path).get<std::string>();
    e.hash = detail::require(j, "hash", path).get<std::string>();
    e.bytes = detail::require(j, "bytes", path).get<std::uint64_t>();
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

void save_manifest(const RunManifest& manifest, const std::string& path) {
  detail::Json doc = {{"verb", manifest.verb},
                      {"args", manifest.args},
                      {"config_hash", manifest.config_hash},
                      {"inputs", entries_to_json(manifest.inputs)},
                      {"outputs", entries_to_json(manifest.outputs)},
                      {"environment", manifest.environment},
                      {"tool_version", manifest.tool_version},
                      {"created_utc", manifest.created_utc}};
  if (manifest.effective_config_json.empty()) {
    doc["effective_config"] = nullptr;
  } else {
    doc["effective_config"] =
        detail::parse_json(manifest.effective_config_json, "effective config");
  }
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  detail::write_text_file(path, doc.dump(2) + "\n");
}

RunManifest load_manifest(const std::string& path) {
  const auto doc = detail::load_json_file(path);
  RunManifest m;
  m.verb = detail::require(doc, "verb", path).get<std::string>();
  m.args = detail::require(doc, "args", path).get<std::vector<std::string>>();
  m.config_hash = doc.value("config_hash", "");
  const auto& config = detail::require(doc, "effective_config", path);
  m.effective_config_json = config.is_null() ? "" : config.dump();
  m.inputs = entries_from_json(detail::require(doc, "inputs", path), path);
  m.outputs = entries_from_json(detail::require(doc, "outputs", path), path);
  if (doc.contains("environment")) {
    m.environment = doc["environment"].get<std::map<std::string, std::string>>();
  }
  m.tool_version = doc.value("tool_version", "");
  m.created_utc = doc.value("created_utc", "");
  return m;
}

}  // namespace stancelab
