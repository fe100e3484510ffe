#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace stancelab {

std::string library_version();

// Content-addressed file reference; hash is FNV-1a 64 over the raw bytes.
struct ManifestEntry {
  std::string path;
  std::string hash;
  std::uint64_t bytes = 0;
};

ManifestEntry manifest_entry(const std::string& path);

// One manifest per CLI run: what ran, on what, producing what. Artifacts are
// reproducible from the recorded effective config plus the input hashes.
struct RunManifest {
  std::string verb;
  std::vector<std::string> args;
  std::string config_hash;
  std::string effective_config_json;  // canonical JSON text; may be empty
  std::vector<ManifestEntry> inputs;
  std::vector<ManifestEntry> outputs;
  std::map<std::string, std::string> environment;
  std::string tool_version;
  std::string created_utc;
};

RunManifest make_manifest(const std::string& verb, const std::vector<std::string>& args);

void add_input(RunManifest& manifest, const std::string& path);
void add_output(RunManifest& manifest, const std::string& path);

void save_manifest(const RunManifest& manifest, const std::string& path);
RunManifest load_manifest(const std::string& path);

}  // namespace stancelab
