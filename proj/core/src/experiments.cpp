#include "stancelab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "json_util.hpp"
#include "stancelab/errors.hpp"
#include "stancelab/prompts.hpp"
#include "stancelab/rng.hpp"

namespace stancelab {

using detail::Json;

ExperimentProfile toy_profile() {
  ExperimentProfile p;
  p.name = "toy";
  p.grpo.steps = 500;
  p.grpo.batch_size = 4;
  p.grpo.group_size = 4;
  p.grpo.lr = 0.08;
  p.grpo.warmup_steps = 50;
  p.grpo.length_target = 10;
  p.sft.steps = 400;
  p.sft.batch_size = 4;
  p.sft.lr = 0.5;
  p.sft.warmup_steps = 40;
  return p;
}

ExperimentProfile paper_profile() {
  ExperimentProfile p;
  p.name = "paper";
  return p;  // struct defaults carry the reference schedule
}

ExperimentProfile profile_by_name(const std::string& name) {
  if (name == "toy") return toy_profile();
  if (name == "paper") return paper_profile();
  throw ConfigError("unknown profile '" + name + "'");
}

namespace {

const std::set<std::string>& known_methods() {
  static const std::set<std::string> methods = {"majority", "random",   "sft",
                                                "grpo",     "sft+grpo", "icl"};
  return methods;
}

void check_method(const std::string& method) {
  if (known_methods().count(method) == 0) {
    throw ConfigError("unknown method '" + method + "'");
  }
}

std::string sanitize_component(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '-' ||
                    c == '_' || c == '+' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? "_" : out;
}

Json grpo_config_json(const GrpoConfig& g) {
  Json j;
  j["steps"] = g.steps;
  j["batch_size"] = g.batch_size;
  j["group_size"] = g.group_size;
  j["lr"] = g.lr;
  j["warmup_steps"] = g.warmup_steps;
  j["temperature"] = g.temperature;
  j["clip_range"] = g.clip_range;
  j["kl_coefficient"] = g.kl_coefficient;
  j["max_grad_norm"] = g.max_grad_norm;
  j["length_target"] = g.length_target;
  j["reward_weights"] = {{"format", g.reward_weights.format},
                         {"length", g.reward_weights.length},
                         {"correct", g.reward_weights.correct}};
  return j;
}

Json sft_config_json(const SftConfig& s) {
  Json j;
  j["steps"] = s.steps;
  j["batch_size"] = s.batch_size;
  j["lr"] = s.lr;
  j["warmup_steps"] = s.warmup_steps;
  return j;
}

}  // namespace

std::string canonical_config_json(const CellConfig& config) {
  Json j;
  j["dataset"] = config.dataset;
  j["scheme"] = config.scheme;
  j["method"] = config.method;
  j["backend"] = config.backend;
  j["unit_id"] = config.unit_id;
  j["bias"] = argument_bias_name(config.bias);
  j["train_fraction"] = config.train_fraction;
  j["icl_context_limit"] = config.icl_context_limit;
  j["seed"] = config.seed;
  j["profile"] = config.profile.name;
  j["grpo"] = grpo_config_json(config.profile.grpo);
  j["sft"] = sft_config_json(config.profile.sft);
  j["eval_runs"] = config.profile.eval_runs;
  j["eval_temperature"] = config.profile.eval_temperature;
  return j.dump();  // nlohmann objects iterate in sorted key order
}

std::string cell_config_hash(const CellConfig& config) {
  return hash_hex(fnv1a64(canonical_config_json(config)));
}

std::vector<std::string> train_fraction_subset(const std::vector<std::string>& ids,
                                               double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw ConfigError("train_fraction must lie in (0, 1]");
  }
  const auto count =
      static_cast<std::size_t>(std::floor(fraction * static_cast<double>(ids.size()) + 1e-9));
  if (count == 0) throw ConfigError("train_fraction selects zero questions");
  if (count == ids.size()) return ids;
  std::vector<std::size_t> order(ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(Rng::derive(seed, "train_fraction"));
  rng.shuffle(order);
  order.resize(count);
  std::sort(order.begin(), order.end());
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i : order) out.push_back(ids[i]);
  return out;
}

namespace {

std::vector<std::string> answered_ids(const Unit& unit, const std::vector<std::string>& ids) {
  std::vector<std::string> out;
  for (const auto& id : ids) {
    if (unit.responses.count(id) != 0) out.push_back(id);
  }
  return out;
}

std::vector<Question> questions_for_ids(const Dataset& dataset,
                                        const std::vector<std::string>& ids) {
  std::vector<Question> out;
  for (const auto& id : ids) {
    const Question* q = dataset.find_question(id);
    if (q == nullptr) throw DataError("unknown question '" + id + "' in split");
    out.push_back(*q);
  }
  return out;
}

std::vector<ArgumentRecord> arguments_for_cell(const DataBundle& bundle,
                                               const CellConfig& config,
                                               const std::vector<Question>& train_questions) {
  if (!bundle.arguments.empty()) {
    std::vector<ArgumentRecord> out;
    for (const auto& r : bundle.arguments) {
      if (r.bias_tag == config.bias) out.push_back(r);
    }
    if (out.empty()) {
      throw ConfigError("no arguments with bias tag '" + argument_bias_name(config.bias) +
                        "' in the provided corpus");
    }
    return out;
  }
  return generate_argument_corpus(train_questions, bundle.dataset.survey,
                                  bundle.dataset.label_space, config.bias, nullptr,
                                  Rng::derive(config.seed, "stub_args"));
}

void write_jsonl_line(std::ofstream& out, const Json& j) { out << j.dump() << "\n"; }

}  // namespace

CellOutcome run_cell(const DataBundle& bundle, const CellConfig& config,
                     const std::string& artifacts_dir) {
  check_method(config.method);
  const Dataset& ds = bundle.dataset;
  const Unit* unit = ds.find_unit(config.unit_id);
  if (unit == nullptr) {
    throw ConfigError("unknown unit '" + config.unit_id + "' in dataset " + config.dataset);
  }
  const ExperimentProfile& profile = config.profile;

  std::vector<std::string> train_ids = answered_ids(*unit, bundle.split.train_ids);
  if (config.train_fraction != 1.0) {
    train_ids = train_fraction_subset(train_ids, config.train_fraction,
                                      Rng::derive(config.seed, "fraction:" + unit->unit_id));
  }
  const std::uint64_t eval_seed = Rng::derive(config.seed, "eval");

  std::string cell_dir;
  if (!artifacts_dir.empty()) {
    cell_dir = artifacts_dir + "/" + sanitize_component(config.unit_id) + "/" +
               sanitize_component(config.method) + "/" + std::to_string(config.seed);
    std::filesystem::create_directories(cell_dir);
  }

  CellOutcome outcome;
  if (config.method == "majority") {
    outcome.scores = evaluate_majority(ds, *unit, train_ids, bundle.split.test_ids,
                                       profile.eval_runs);
    return outcome;
  }
  if (config.method == "random") {
    outcome.scores = evaluate_random(ds, *unit, bundle.split.test_ids, profile.eval_runs,
                                     eval_seed);
    return outcome;
  }

  auto policy = make_policy(config.backend, ds.label_space);
  if (config.method == "icl") {
    outcome.scores =
        evaluate_icl(*policy, ds, *unit, train_ids, bundle.split.test_ids,
                     config.icl_context_limit, profile.eval_runs,
                     profile.eval_temperature, eval_seed);
    return outcome;
  }

  const std::vector<Question> train_questions = questions_for_ids(ds, train_ids);
  const bool wants_sft = config.method == "sft" || config.method == "sft+grpo";
  const bool wants_grpo = config.method == "grpo" || config.method == "sft+grpo";

  if (wants_sft) {
    const auto arguments = arguments_for_cell(bundle, config, train_questions);
    const auto corpus = build_sft_corpus(ds, *unit, train_ids, arguments);
    SftConfig sft_config = profile.sft;
    sft_config.seed = Rng::derive(config.seed, "sft");
    std::ofstream log;
    if (!cell_dir.empty()) log.open(cell_dir + "/sft_log.jsonl", std::ios::binary);
    const SftResult sft = sft_train(
        *policy, corpus, sft_config, [&](int step, double loss, double lr) {
          if (log.is_open()) {
            write_jsonl_line(log, {{"step", step}, {"loss", loss}, {"lr", lr}});
          }
        });
    outcome.sft_losses = sft.losses;
  }

  if (wants_grpo) {
    GrpoConfig grpo_config = profile.grpo;
    grpo_config.seed = Rng::derive(config.seed, "grpo");
    std::ofstream log;
    if (!cell_dir.empty()) log.open(cell_dir + "/train_log.jsonl", std::ios::binary);
    const GrpoResult trained = grpo_train(
        *policy, train_questions, *unit, unit->country, ds.label_space, grpo_config,
        [&](const TrainStepLog& entry, const std::string& checkpoint) {
          if (log.is_open()) {
            write_jsonl_line(log, {{"step", entry.step},
                                   {"mean_reward", entry.mean_reward},
                                   {"mean_abs_advantage", entry.mean_abs_advantage},
                                   {"loss", entry.loss},
                                   {"lr", entry.lr}});
          }
          if (!checkpoint.empty() && !cell_dir.empty()) {
            detail::write_text_file(
                cell_dir + "/step" + std::to_string(entry.step) + ".json", checkpoint);
          }
        });
    outcome.train_log = trained.log;
  }

  outcome.scores = evaluate_unit(*policy, ds, *unit, bundle.split.test_ids, config.method,
                                 profile.eval_runs, profile.eval_temperature, eval_seed);
  outcome.final_checkpoint = policy->checkpoint_json();
  if (!cell_dir.empty()) {
    detail::write_text_file(cell_dir + "/final.json", outcome.final_checkpoint);
  }
  return outcome;
}

// ---------------------------------------------------------------------------
// Matrix file

namespace {

std::string trim_copy(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Single-line values only: strings, numbers, booleans, arrays of those.
Json parse_toml_value(const std::string& raw, const std::string& context) {
  const std::string v = trim_copy(raw);
  if (v.empty()) throw DataError(context + ": empty value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') throw DataError(context + ": unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size()) {
        ++i;
        out.push_back(v[i] == 'n' ? '\n' : v[i]);
      } else {
        out.push_back(v[i]);
      }
    }
    return Json(out);
  }
  if (v.front() == '[') {
    if (v.back() != ']') throw DataError(context + ": unterminated array");
    Json arr = Json::array();
    std::string inner = v.substr(1, v.size() - 2);
    std::size_t start = 0;
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = 0; i <= inner.size(); ++i) {
      const bool at_end = i == inner.size();
      const char c = at_end ? ',' : inner[i];
      if (!at_end && c == '"') in_string = !in_string;
      if (!at_end && !in_string && c == '[') ++depth;
      if (!at_end && !in_string && c == ']') --depth;
      if (c == ',' && depth == 0 && !in_string) {
        const std::string piece = trim_copy(inner.substr(start, i - start));
        if (!piece.empty()) arr.push_back(parse_toml_value(piece, context));
        start = i + 1;
      }
    }
    return arr;
  }
  if (v == "true") return Json(true);
  if (v == "false") return Json(false);
  if (v.find_first_of(".eE") != std::string::npos) {
    try {
      return Json(std::stod(v));
    } catch (...) {
      throw DataError(context + ": bad number '" + v + "'");
    }
  }
  try {
    return Json(static_cast<std::int64_t>(std::stoll(v)));
  } catch (...) {
    throw DataError(context + ": bad value '" + v + "'");
  }
}

Json parse_toml_subset(const std::string& text, const std::string& path) {
  Json out = Json::object();
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string context = path + ":" + std::to_string(line_no);
    // strip comments outside strings
    bool in_string = false;
    std::string body;
    for (char c : line) {
      if (c == '"') in_string = !in_string;
      if (c == '#' && !in_string) break;
      body.push_back(c);
    }
    body = trim_copy(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw DataError(context + ": expected key = value");
    }
    const std::string key = trim_copy(body.substr(0, eq));
    if (key.empty()) throw DataError(context + ": empty key");
    out[key] = parse_toml_value(body.substr(eq + 1), context);
  }
  return out;
}

std::vector<std::string> string_list(const Json& j, const std::string& key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  for (const auto& v : j.at(key)) out.push_back(v.get<std::string>());
  return out;
}

}  // namespace

MatrixSpec parse_matrix_file(const std::string& path) {
  const std::string text = detail::read_text_file(path);
  Json j;
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    j = detail::parse_json(text, path);
  } else {
    j = parse_toml_subset(text, path);
  }
  MatrixSpec spec;
  spec.datasets = string_list(j, "datasets");
  spec.methods = string_list(j, "methods");
  spec.units = string_list(j, "units");
  spec.backend = j.value("backend", spec.backend);
  spec.profile = j.value("profile", spec.profile);
  spec.seed = j.value("seed", spec.seed);
  spec.bias = j.value("bias", spec.bias);
  spec.train_fraction = j.value("train_fraction", spec.train_fraction);
  spec.icl_context_limit = j.value("icl_context_limit", spec.icl_context_limit);
  spec.workers = j.value("workers", spec.workers);
  if (spec.datasets.empty()) throw ConfigError(path + ": no datasets listed");
  if (spec.methods.empty()) throw ConfigError(path + ": no methods listed");
  return spec;
}

MatrixSummary run_method_matrix(const std::map<std::string, DataBundle>& bundles,
                                const MatrixSpec& spec, ResultsStore& store,
                                const std::string& artifacts_dir) {
  for (const auto& m : spec.methods) check_method(m);
  const ExperimentProfile profile = profile_by_name(spec.profile);
  const ArgumentBias bias = argument_bias_from_name(spec.bias);

  struct Cell {
    const DataBundle* bundle;
    CellConfig config;
    std::string hash;
  };
  std::vector<Cell> cells;
  for (const auto& dataset_id : spec.datasets) {
    auto it = bundles.find(dataset_id);
    if (it == bundles.end()) throw ConfigError("no data bundle for dataset '" + dataset_id + "'");
    const DataBundle& bundle = it->second;
    std::vector<std::string> unit_ids;
    if (spec.units.empty()) {
      for (const auto& u : bundle.dataset.units) unit_ids.push_back(u.unit_id);
    } else {
      for (const auto& u : spec.units) {
        if (bundle.dataset.find_unit(u) != nullptr) unit_ids.push_back(u);
      }
    }
    for (const auto& method : spec.methods) {
      for (const auto& unit_id : unit_ids) {
        CellConfig config;
        config.dataset = dataset_id;
        config.scheme = bundle.scheme;
        config.method = method;
        config.backend = spec.backend;
        config.unit_id = unit_id;
        config.bias = bias;
        config.train_fraction = spec.train_fraction;
        config.icl_context_limit = spec.icl_context_limit;
        config.seed = Rng::derive(spec.seed, dataset_id + "|" + method + "|" + unit_id);
        config.profile = profile;
        Cell cell{&bundle, std::move(config), ""};
        cell.hash = cell_config_hash(cell.config);
        cells.push_back(std::move(cell));
      }
    }
  }

  std::atomic<int> ran{0};
  std::atomic<int> skipped{0};
  std::atomic<int> failed{0};
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
      const Cell& cell = cells[i];
      if (store.has_config(cell.hash)) {
        skipped.fetch_add(1);
        continue;
      }
      std::string cell_artifacts;
      if (!artifacts_dir.empty()) {
        cell_artifacts = artifacts_dir + "/" + sanitize_component(cell.config.dataset);
      }
      try {
        const CellOutcome outcome = run_cell(*cell.bundle, cell.config, cell_artifacts);
        std::vector<ResultRow> rows;
        for (const auto& s : outcome.scores) {
          rows.push_back(result_row_from_scores(s, cell.hash, cell.config.dataset,
                                                cell.config.scheme, cell.config.seed));
        }
        store.append(rows);
        ran.fetch_add(1);
      } catch (const std::exception& e) {
        ResultRow row;
        row.config_hash = cell.hash;
        row.dataset = cell.config.dataset;
        row.scheme = cell.config.scheme;
        row.method = cell.config.method;
        row.unit_id = cell.config.unit_id;
        row.seed = cell.config.seed;
        row.status = "failed";
        row.error = e.what();
        store.append({row});
        failed.fetch_add(1);
      }
    }
  };

  int n_workers = spec.workers;
  if (n_workers <= 0) {
    n_workers = static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers <= 0) n_workers = 2;
  }
  n_workers = std::min<int>(n_workers, static_cast<int>(cells.size()));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  return {ran.load(), skipped.load(), failed.load()};
}

// ---------------------------------------------------------------------------
// Aggregation

ScoreAggregate aggregate_scores(const std::vector<RunScores>& scores) {
  if (scores.empty()) throw MetricError("aggregate_scores: no rows");
  std::map<int, std::vector<double>> f1_by_run;
  std::map<int, std::vector<double>> acc_by_run;
  std::set<std::string> units;
  for (const auto& s : scores) {
    f1_by_run[s.run_index].push_back(s.macro_f1);
    acc_by_run[s.run_index].push_back(s.accuracy);
    units.insert(s.unit_id);
  }
  std::vector<double> f1_means;
  std::vector<double> acc_means;
  for (const auto& [run, values] : f1_by_run) f1_means.push_back(mean(values));
  for (const auto& [run, values] : acc_by_run) acc_means.push_back(mean(values));

  ScoreAggregate agg;
  agg.mean_macro_f1 = mean(f1_means);
  agg.mean_accuracy = mean(acc_means);
  agg.std_macro_f1 = f1_means.size() > 1 ? sample_stddev(f1_means) : 0.0;
  agg.std_accuracy = acc_means.size() > 1 ? sample_stddev(acc_means) : 0.0;
  agg.n_units = static_cast<int>(units.size());
  agg.n_runs = static_cast<int>(f1_by_run.size());
  return agg;
}

std::vector<double> run_level_means(const std::vector<RunScores>& scores) {
  std::map<int, std::vector<double>> by_run;
  for (const auto& s : scores) by_run[s.run_index].push_back(s.macro_f1);
  std::vector<double> out;
  for (const auto& [run, values] : by_run) out.push_back(mean(values));
  return out;
}

std::map<std::string, double> per_unit_mean_f1(const std::vector<RunScores>& scores) {
  std::map<std::string, std::vector<double>> by_unit;
  for (const auto& s : scores) by_unit[s.unit_id].push_back(s.macro_f1);
  std::map<std::string, double> out;
  for (const auto& [unit, values] : by_unit) out[unit] = mean(values);
  return out;
}

// ---------------------------------------------------------------------------
// Named experiments

namespace {

double mean_f1_of(const std::vector<RunScores>& scores) {
  std::vector<double> v;
  for (const auto& s : scores) v.push_back(s.macro_f1);
  return mean(v);
}

double std_f1_of(const std::vector<RunScores>& scores) {
  std::vector<double> v;
  for (const auto& s : scores) v.push_back(s.macro_f1);
  return v.size() > 1 ? sample_stddev(v) : 0.0;
}

// Ground truth everywhere; nullopt when the unit misses a model column.
std::optional<std::vector<double>> truth_vector(const SpaceModel& model, const Unit& unit) {
  std::vector<double> v;
  v.reserve(model.column_ids.size());
  for (const auto& qid : model.column_ids) {
    auto it = unit.responses.find(qid);
    if (it == unit.responses.end()) return std::nullopt;
    v.push_back(it->second == Stance::Yes ? 1.0 : 0.0);
  }
  return v;
}

// Ground-truth train answers with greedy predictions on test columns.
std::optional<std::vector<double>> agent_vector(
    const SpaceModel& model, const Unit& unit, const std::set<std::string>& test_ids,
    const std::map<std::string, Stance>& predictions) {
  std::vector<double> v;
  v.reserve(model.column_ids.size());
  for (const auto& qid : model.column_ids) {
    if (test_ids.count(qid) != 0) {
      auto p = predictions.find(qid);
      if (p == predictions.end()) return std::nullopt;
      v.push_back(p->second == Stance::Yes ? 1.0 : 0.0);
    } else {
      auto it = unit.responses.find(qid);
      if (it == unit.responses.end()) return std::nullopt;
      v.push_back(it->second == Stance::Yes ? 1.0 : 0.0);
    }
  }
  return v;
}

CellConfig sft_grpo_cell(const DataBundle& bundle, const std::string& backend,
                         const ExperimentProfile& profile, const std::string& unit_id,
                         std::uint64_t seed) {
  CellConfig config;
  config.dataset = survey_name(bundle.dataset.survey);
  config.scheme = bundle.scheme;
  config.method = "sft+grpo";
  config.backend = backend;
  config.unit_id = unit_id;
  config.seed = seed;
  config.profile = profile;
  return config;
}

}  // namespace

BiasReport run_bias_experiment(
    const DataBundle& bundle, const SpaceModel& model,
    const std::map<std::string, std::vector<ArgumentRecord>>& corpora,
    const std::string& backend, const ExperimentProfile& profile, std::uint64_t seed) {
  const std::vector<std::string> tags = {"default", "progressive", "conservative"};
  if (!corpora.empty()) {
    for (const auto& tag : tags) {
      if (corpora.count(tag) == 0) {
        throw ConfigError("bias experiment: missing corpus for tag '" + tag + "'");
      }
    }
  }
  const std::set<std::string> test_ids(bundle.split.test_ids.begin(),
                                       bundle.split.test_ids.end());
  BiasReport report;
  for (const auto& tag : tags) {
    DataBundle conditioned = bundle;
    if (!corpora.empty()) conditioned.arguments = corpora.at(tag);
    std::vector<DisplacementPair> pairs;
    for (const auto& unit : bundle.dataset.units) {
      CellConfig config = sft_grpo_cell(conditioned, backend, profile, unit.unit_id,
                                        Rng::derive(seed, tag + "|" + unit.unit_id));
      config.bias = argument_bias_from_name(tag);
      const CellOutcome outcome = run_cell(conditioned, config);
      report.cells.push_back(
          {tag, unit.unit_id, group_name(unit.group), mean_f1_of(outcome.scores)});

      const auto human = truth_vector(model, unit);
      if (!human) continue;
      auto policy = policy_from_checkpoint(outcome.final_checkpoint);
      const auto preds =
          greedy_predictions(*policy, bundle.dataset, unit, bundle.split.test_ids);
      const auto agent = agent_vector(model, unit, test_ids, preds);
      if (!agent) continue;
      pairs.push_back({group_name(unit.group), project(model, *human), project(model, *agent)});
    }
    for (const auto& [group, d] : displacement_vectors(pairs)) {
      report.displacements.push_back({tag, group, d.x, d.y});
    }
  }
  return report;
}

std::vector<InversionRow> run_inversion_experiment(const DataBundle& bundle,
                                                   const SpaceModel& model,
                                                   const std::string& backend,
                                                   const ExperimentProfile& profile,
                                                   std::uint64_t seed) {
  if (bundle.dataset.label_space.size() != 2) {
    throw ConfigError("inversion experiment requires a binary dataset");
  }
  DataBundle inverted = bundle;
  inverted.dataset = invert_answers(bundle.dataset);

  std::vector<InversionRow> rows;
  for (const auto& unit : bundle.dataset.units) {
    const auto truth = truth_vector(model, unit);
    if (!truth) continue;  // incomplete questionnaire, no PC1 coordinate
    InversionRow row;
    row.unit_id = unit.unit_id;
    row.pc1 = project(model, *truth).x;

    const CellOutcome original =
        run_cell(bundle, sft_grpo_cell(bundle, backend, profile, unit.unit_id,
                                       Rng::derive(seed, "orig|" + unit.unit_id)));
    row.f1_original = mean_f1_of(original.scores);

    const CellOutcome flipped =
        run_cell(inverted, sft_grpo_cell(inverted, backend, profile, unit.unit_id,
                                         Rng::derive(seed, "inv|" + unit.unit_id)));
    row.f1_inverted = mean_f1_of(flipped.scores);
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(),
            [](const InversionRow& a, const InversionRow& b) { return a.pc1 < b.pc1; });
  return rows;
}

std::vector<TrainsizeRow> run_trainsize_ablation(const DataBundle& bundle,
                                                 const std::vector<double>& fractions,
                                                 const std::string& backend,
                                                 const ExperimentProfile& profile,
                                                 std::uint64_t seed) {
  for (double f : fractions) {
    if (!(f > 0.0) || f > 1.0) throw ConfigError("train fraction outside (0, 1]");
  }
  std::vector<TrainsizeRow> rows;
  for (const auto& unit : bundle.dataset.units) {
    const std::uint64_t unit_seed = Rng::derive(seed, "trainsize|" + unit.unit_id);
    for (double fraction : fractions) {
      CellConfig config = sft_grpo_cell(bundle, backend, profile, unit.unit_id, unit_seed);
      config.train_fraction = fraction;
      const CellOutcome outcome = run_cell(bundle, config);
      rows.push_back(
          {unit.unit_id, fraction, mean_f1_of(outcome.scores), std_f1_of(outcome.scores)});
    }
  }
  return rows;
}

std::vector<SchemeOutcome> run_recoding_comparison(const DataBundle& conservative,
                                                   const DataBundle& aggressive,
                                                   const std::string& backend,
                                                   const ExperimentProfile& profile,
                                                   std::uint64_t seed) {
  std::vector<SchemeOutcome> out;
  for (const DataBundle* bundle : {&conservative, &aggressive}) {
    if (bundle->dataset.label_space.size() != 3) {
      throw ConfigError("recoding comparison expects ternary scheme datasets");
    }
    SchemeOutcome outcome;
    outcome.scheme = bundle->scheme;
    std::vector<Stance> pooled_truths;
    std::vector<Prediction> pooled_preds;
    for (const auto& unit : bundle->dataset.units) {
      const CellOutcome cell =
          run_cell(*bundle, sft_grpo_cell(*bundle, backend, profile, unit.unit_id,
                                          Rng::derive(seed, bundle->scheme + "|" + unit.unit_id)));
      outcome.runs.insert(outcome.runs.end(), cell.scores.begin(), cell.scores.end());

      auto policy = policy_from_checkpoint(cell.final_checkpoint);
      const auto preds =
          greedy_predictions(*policy, bundle->dataset, unit, bundle->split.test_ids);
      for (const auto& [qid, pred] : preds) {
        pooled_truths.push_back(unit.responses.at(qid));
        pooled_preds.push_back(pred);
      }
    }
    outcome.confusion =
        confusion_matrix(pooled_truths, pooled_preds, bundle->dataset.label_space);
    const auto unit_f1 = per_unit_mean_f1(outcome.runs);
    std::map<std::string, double> unit_neutral;
    for (const auto& s : outcome.runs) unit_neutral[s.unit_id] = s.neutral_base_rate;
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& [unit, f1] : unit_f1) {
      x.push_back(unit_neutral.at(unit));
      y.push_back(f1);
    }
    outcome.regression = ols_regression(x, y);
    outcome.aggregate = aggregate_scores(outcome.runs);
    out.push_back(std::move(outcome));
  }
  return out;
}

}  // namespace stancelab
