#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "stancelab/evalharness.hpp"

namespace stancelab {

std::uint64_t fnv1a64(const std::string& text);
std::string hash_hex(std::uint64_t value);

// Shortest round-trip decimal form, stable across runs and platforms using
// the same IEEE doubles. All persisted numbers go through this.
std::string format_double(double value);

struct ResultRow {
  std::string config_hash;
  std::string dataset;
  std::string scheme;
  std::string method;
  std::string unit_id;
  int run_index = 0;  // 0 on failure rows
  std::uint64_t seed = 0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  double neutral_base_rate = 0.0;
  std::map<Stance, double> per_class_recall;
  std::string status = "ok";  // "ok" | "failed"
  std::string error;
};

ResultRow result_row_from_scores(const RunScores& scores, const std::string& config_hash,
                                 const std::string& dataset, const std::string& scheme,
                                 std::uint64_t seed);

// Append-only JSON-lines file plus derived, canonically sorted views. Appends
// are serialized in-process; a batch is written as one contiguous block.
class ResultsStore {
 public:
  explicit ResultsStore(std::string root_dir);

  const std::string& root() const { return root_; }
  std::string raw_path() const;

  void append(const std::vector<ResultRow>& rows);
  std::vector<ResultRow> load() const;  // file order, duplicates included

  // True when at least one ok row with this config hash exists.
  bool has_config(const std::string& config_hash) const;

  // Deduplicated by (config_hash, unit_id, run_index), sorted; byte-stable.
  void write_canonical(const std::string& path) const;
  void write_csv(const std::string& path) const;

  // Config hashes whose duplicate rows disagree on any score.
  std::vector<std::string> determinism_violations() const;

 private:
  std::string root_;
  mutable std::mutex mutex_;
};

}  // namespace stancelab
