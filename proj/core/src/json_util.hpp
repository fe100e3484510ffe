#pragma once

// Internal JSON helpers; nlohmann/json stays out of the public headers.

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "stancelab/errors.hpp"

namespace stancelab::detail {

using Json = nlohmann::json;

inline Json parse_json(const std::string& text, const std::string& what) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw DataError(what + ": invalid JSON");
  return j;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Json load_json_file(const std::string& path) {
  return parse_json(read_text_file(path), path);
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out << text;
  if (!out) throw DataError("failed writing " + path);
}

inline const Json& require(const Json& j, const std::string& key,
                           const std::string& context) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(context + ": missing key '" + key + "'");
  return *it;
}

}  // namespace stancelab::detail
