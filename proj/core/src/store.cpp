#include "stancelab/store.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <tuple>

#include "json_util.hpp"
#include "stancelab/errors.hpp"

namespace stancelab {

using detail::Json;

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

ResultRow result_row_from_scores(const RunScores& scores, const std::string& config_hash,
                                 const std::string& dataset, const std::string& scheme,
                                 std::uint64_t seed) {
  ResultRow row;
  row.config_hash = config_hash;
  row.dataset = dataset;
  row.scheme = scheme;
  row.method = scores.method;
  row.unit_id = scores.unit_id;
  row.run_index = scores.run_index;
  row.seed = seed;
  row.macro_f1 = scores.macro_f1;
  row.accuracy = scores.accuracy;
  row.neutral_base_rate = scores.neutral_base_rate;
  row.per_class_recall = scores.per_class_recall;
  return row;
}

namespace {

Json row_to_json(const ResultRow& r) {
  Json j;
  j["config_hash"] = r.config_hash;
  j["dataset"] = r.dataset;
  j["scheme"] = r.scheme;
  j["method"] = r.method;
  j["unit_id"] = r.unit_id;
  j["run_index"] = r.run_index;
  j["seed"] = r.seed;
  j["macro_f1"] = r.macro_f1;
  j["accuracy"] = r.accuracy;
  j["neutral_base_rate"] = r.neutral_base_rate;
  Json recall = Json::object();
  for (const auto& [stance, value] : r.per_class_recall) {
    recall[stance_label(stance)] = value;
  }
  j["per_class_recall"] = recall;
  j["status"] = r.status;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

ResultRow row_from_json(const Json& j, const std::string& context) {
  ResultRow r;
  r.config_hash = detail::require(j, "config_hash", context).get<std::string>();
  r.dataset = detail::require(j, "dataset", context).get<std::string>();
  r.scheme = detail::require(j, "scheme", context).get<std::string>();
  r.method = detail::require(j, "method", context).get<std::string>();
  r.unit_id = detail::require(j, "unit_id", context).get<std::string>();
  r.run_index = detail::require(j, "run_index", context).get<int>();
  r.seed = detail::require(j, "seed", context).get<std::uint64_t>();
  r.macro_f1 = detail::require(j, "macro_f1", context).get<double>();
  r.accuracy = detail::require(j, "accuracy", context).get<double>();
  r.neutral_base_rate = detail::require(j, "neutral_base_rate", context).get<double>();
  for (const auto& [label, value] :
       detail::require(j, "per_class_recall", context).items()) {
    const auto stance = stance_from_label(label);
    if (!stance) throw DataError(context + ": bad recall label '" + label + "'");
    r.per_class_recall[*stance] = value.get<double>();
  }
  r.status = detail::require(j, "status", context).get<std::string>();
  r.error = j.value("error", "");
  return r;
}

auto sort_key(const ResultRow& r) {
  return std::tie(r.dataset, r.scheme, r.method, r.unit_id, r.run_index, r.config_hash);
}

bool scores_equal(const ResultRow& a, const ResultRow& b) {
  return a.macro_f1 == b.macro_f1 && a.accuracy == b.accuracy &&
         a.neutral_base_rate == b.neutral_base_rate &&
         a.per_class_recall == b.per_class_recall && a.status == b.status;
}

std::vector<ResultRow> dedup_sorted(std::vector<ResultRow> rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ResultRow& a, const ResultRow& b) {
                     return sort_key(a) < sort_key(b);
                   });
  std::vector<ResultRow> out;
  for (auto& r : rows) {
    if (!out.empty() && out.back().config_hash == r.config_hash &&
        out.back().unit_id == r.unit_id && out.back().run_index == r.run_index) {
      continue;  // a rerun of the same cell; determinism audit checks equality
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace

ResultsStore::ResultsStore(std::string root_dir) : root_(std::move(root_dir)) {
  std::filesystem::create_directories(root_);
}

std::string ResultsStore::raw_path() const { return root_ + "/results.jsonl"; }

void ResultsStore::append(const std::vector<ResultRow>& rows) {
  if (rows.empty()) return;
  std::ostringstream block;
  for (const auto& r : rows) block << row_to_json(r).dump() << "\n";
  std::lock_guard<std::mutex> lock(mutex_);
  std::ofstream out(raw_path(), std::ios::binary | std::ios::app);
  if (!out) throw DataError("cannot open results store at '" + raw_path() + "'");
  out << block.str();
  out.flush();
  if (!out) throw DataError("write to results store failed");
}

std::vector<ResultRow> ResultsStore::load() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<ResultRow> rows;
  std::ifstream in(raw_path());
  if (!in) return rows;  // nothing recorded yet
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string context = "results.jsonl:" + std::to_string(line_no);
    rows.push_back(row_from_json(detail::parse_json(line, context), context));
  }
  return rows;
}

bool ResultsStore::has_config(const std::string& config_hash) const {
  for (const auto& r : load()) {
    if (r.config_hash == config_hash && r.status == "ok") return true;
  }
  return false;
}

void ResultsStore::write_canonical(const std::string& path) const {
  const auto rows = dedup_sorted(load());
  Json arr = Json::array();
  for (const auto& r : rows) arr.push_back(row_to_json(r));
  detail::write_text_file(path, arr.dump(2) + "\n");
}

void ResultsStore::write_csv(const std::string& path) const {
  const auto rows = dedup_sorted(load());
  std::ostringstream out;
  out << "config_hash,dataset,scheme,method,unit_id,run_index,seed,macro_f1,accuracy,"
         "neutral_base_rate,recall_yes,recall_no,recall_neutral,status,error\n";
  for (const auto& r : rows) {
    out << r.config_hash << ',' << csv_escape(r.dataset) << ',' << csv_escape(r.scheme)
        << ',' << csv_escape(r.method) << ',' << csv_escape(r.unit_id) << ','
        << r.run_index << ',' << r.seed << ',' << format_double(r.macro_f1) << ','
        << format_double(r.accuracy) << ',' << format_double(r.neutral_base_rate);
    for (Stance s : {Stance::Yes, Stance::No, Stance::Neutral}) {
      out << ',';
      auto it = r.per_class_recall.find(s);
      if (it != r.per_class_recall.end()) out << format_double(it->second);
    }
    out << ',' << r.status << ',' << csv_escape(r.error) << "\n";
  }
  detail::write_text_file(path, out.str());
}

std::vector<std::string> ResultsStore::determinism_violations() const {
  const auto rows = load();
  std::map<std::tuple<std::string, std::string, int>, const ResultRow*> seen;
  std::vector<std::string> bad;
  for (const auto& r : rows) {
    const auto key = std::make_tuple(r.config_hash, r.unit_id, r.run_index);
    auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(key, &r);
    } else if (!scores_equal(*it->second, r)) {
      if (bad.empty() || bad.back() != r.config_hash) bad.push_back(r.config_hash);
    }
  }
  return bad;
}

}  // namespace stancelab
