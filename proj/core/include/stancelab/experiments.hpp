#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stancelab/evalharness.hpp"
#include "stancelab/grpo.hpp"
#include "stancelab/metrics.hpp"
#include "stancelab/sft.hpp"
#include "stancelab/space.hpp"
#include "stancelab/stats.hpp"
#include "stancelab/store.hpp"

namespace stancelab {

struct ExperimentProfile {
  std::string name = "toy";
  GrpoConfig grpo;
  SftConfig sft;
  int eval_runs = 8;
  double eval_temperature = 1.0;
};

// Desk-scale settings: shorter schedule, smaller batches and groups, short
// length target matching the toy template bank.
ExperimentProfile toy_profile();
// The reference schedule: 800 steps, batch 8, group 8, lr 5e-6 (RL) / 5e-5
// (SFT), 80 warmup steps, temperature 1.0, beta 0.
ExperimentProfile paper_profile();
ExperimentProfile profile_by_name(const std::string& name);

// Everything one training/evaluation cell depends on.
struct DataBundle {
  Dataset dataset;
  Split split;
  std::vector<ArgumentRecord> arguments;  // empty: stub corpus generated per cell
  std::string scheme;                     // recoding tag recorded in results
};

struct CellConfig {
  std::string dataset;
  std::string scheme;
  std::string method;  // majority | random | sft | grpo | sft+grpo | icl
  std::string backend = "toy_tabular";
  std::string unit_id;
  ArgumentBias bias = ArgumentBias::Default;
  double train_fraction = 1.0;
  int icl_context_limit = 0;
  std::uint64_t seed = 0;
  ExperimentProfile profile;
};

// Canonical JSON (sorted keys, shortest float form) fed to the hash; the hash
// identifies a cell for resume and for the determinism audit.
std::string canonical_config_json(const CellConfig& config);
std::string cell_config_hash(const CellConfig& config);

// First floor(fraction * n) ids of a seeded shuffle, returned in the original
// order. One shuffle serves all fractions, so smaller subsets nest in larger.
std::vector<std::string> train_fraction_subset(const std::vector<std::string>& ids,
                                               double fraction, std::uint64_t seed);

struct CellOutcome {
  std::vector<RunScores> scores;
  std::vector<TrainStepLog> train_log;   // grpo methods
  std::vector<double> sft_losses;        // sft methods
  std::string final_checkpoint;          // empty for training-free methods
};

// Runs one (unit, method) cell from a fresh policy. When artifacts_dir is
// non-empty, writes checkpoints and logs under
// {artifacts_dir}/{unit}/{method}/{seed}/.
CellOutcome run_cell(const DataBundle& bundle, const CellConfig& config,
                     const std::string& artifacts_dir = "");

struct MatrixSpec {
  std::vector<std::string> datasets;
  std::vector<std::string> methods;
  std::vector<std::string> units;  // empty: every unit of each dataset
  std::string backend = "toy_tabular";
  std::string profile = "toy";
  std::uint64_t seed = 0;
  std::string bias = "default";
  double train_fraction = 1.0;
  int icl_context_limit = 0;
  int workers = 0;  // 0: decide from hardware
};

// Reads a .json matrix file, or a flat key = value TOML subset (strings,
// numbers, booleans, arrays of strings; no tables).
MatrixSpec parse_matrix_file(const std::string& path);

struct MatrixSummary {
  int ran = 0;
  int skipped = 0;  // config hash already completed
  int failed = 0;
};

// Bounded worker pool over all (dataset, method, unit) cells; failures are
// recorded as failed rows and the matrix continues.
MatrixSummary run_method_matrix(const std::map<std::string, DataBundle>& bundles,
                                const MatrixSpec& spec, ResultsStore& store,
                                const std::string& artifacts_dir = "");

// Table-3-style aggregation: per run index, scores are averaged across units;
// mean and sample std are then taken over the run-level means.
struct ScoreAggregate {
  double mean_macro_f1 = 0.0;
  double std_macro_f1 = 0.0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  int n_units = 0;
  int n_runs = 0;
};

ScoreAggregate aggregate_scores(const std::vector<RunScores>& scores);

// Per-run across-unit means, run index order; the samples Welch tests consume.
std::vector<double> run_level_means(const std::vector<RunScores>& scores);

std::map<std::string, double> per_unit_mean_f1(const std::vector<RunScores>& scores);

// ---------------------------------------------------------------------------
// Named experiments

struct BiasCell {
  std::string bias;
  std::string unit_id;
  std::string group;
  double mean_macro_f1 = 0.0;
};

struct BiasDisplacement {
  std::string bias;
  std::string group;
  double dx = 0.0;
  double dy = 0.0;
};

struct BiasReport {
  std::vector<BiasCell> cells;
  std::vector<BiasDisplacement> displacements;
};

// SFT+GRPO per unit under each argument corpus; per-group score cells plus
// PCA displacement arrows. `corpora` may be empty (stub corpora generated per
// bias tag); when provided it must cover all three tags.
BiasReport run_bias_experiment(const DataBundle& bundle, const SpaceModel& model,
                               const std::map<std::string, std::vector<ArgumentRecord>>& corpora,
                               const std::string& backend,
                               const ExperimentProfile& profile, std::uint64_t seed);

struct InversionRow {
  std::string unit_id;
  double pc1 = 0.0;
  double f1_original = 0.0;
  double f1_inverted = 0.0;
};

// Trains on original and on stance-flipped data, reports per-unit F1 pairs
// ordered by the unit's ground-truth PC1 coordinate. Binary datasets only.
std::vector<InversionRow> run_inversion_experiment(const DataBundle& bundle,
                                                   const SpaceModel& model,
                                                   const std::string& backend,
                                                   const ExperimentProfile& profile,
                                                   std::uint64_t seed);

struct TrainsizeRow {
  std::string unit_id;
  double fraction = 0.0;
  double mean_macro_f1 = 0.0;
  double std_macro_f1 = 0.0;
};

std::vector<TrainsizeRow> run_trainsize_ablation(const DataBundle& bundle,
                                                 const std::vector<double>& fractions,
                                                 const std::string& backend,
                                                 const ExperimentProfile& profile,
                                                 std::uint64_t seed);

struct SchemeOutcome {
  std::string scheme;
  std::vector<RunScores> runs;
  ConfusionMatrix confusion;       // greedy predictions pooled over units
  RegressionResult regression;     // per-unit mean F1 vs neutral base rate
  ScoreAggregate aggregate;
};

std::vector<SchemeOutcome> run_recoding_comparison(const DataBundle& conservative,
                                                   const DataBundle& aggressive,
                                                   const std::string& backend,
                                                   const ExperimentProfile& profile,
                                                   std::uint64_t seed);

}  // namespace stancelab
