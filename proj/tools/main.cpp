// stancelab: operator surface over the core library. One verb per pipeline
// stage; every run writes a manifest with the effective config and the
// hashes of everything it read and wrote.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "stancelab/errors.hpp"
#include "stancelab/evalharness.hpp"
#include "stancelab/experiments.hpp"
#include "stancelab/manifest.hpp"
#include "stancelab/report.hpp"
#include "stancelab/space.hpp"
#include "stancelab/store.hpp"
#include "stancelab/survey.hpp"

namespace sl = stancelab;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sl::DataError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

// Options shared by every verb: where results live, where the manifest goes.
struct Common {
  std::string results = "results";
  std::string manifest_path;  // empty: derived from verb + args
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--results", c.results, "results root directory")
      ->envname("STANCELAB_RESULTS_ROOT")
      ->capture_default_str();
  sub->add_option("--manifest", c.manifest_path, "manifest output path");
  sub->set_config("--config", "", "config file, key=value per line");
}

class ManifestWriter {
 public:
  ManifestWriter(const std::string& verb, const std::vector<std::string>& args,
                 const Common& common)
      : manifest_(sl::make_manifest(verb, args)) {
    for (const char* name :
         {"STANCELAB_RESULTS_ROOT", "STANCELAB_LM_ENDPOINT", "STANCELAB_WORKERS"}) {
      if (const char* value = std::getenv(name)) manifest_.environment[name] = value;
    }
    if (!common.manifest_path.empty()) {
      path_ = common.manifest_path;
    } else {
      std::string joined = verb;
      for (const auto& a : args) {
        joined.push_back('\x1f');
        joined += a;
      }
      path_ = common.results + "/manifests/" + verb + "_" +
              sl::hash_hex(sl::fnv1a64(joined)) + ".json";
    }
  }

  // Canonical JSON text of the resolved settings; the hash doubles as the run
  // identity unless a more specific one (the cell hash) was set first.
  void config(const std::string& canonical_json) {
    manifest_.effective_config_json = canonical_json;
    if (manifest_.config_hash.empty()) {
      manifest_.config_hash = sl::hash_hex(sl::fnv1a64(canonical_json));
    }
  }
  void config(const Json& j) { config(j.dump()); }
  void config_hash(const std::string& hash) { manifest_.config_hash = hash; }

  void input(const std::string& path) { sl::add_input(manifest_, path); }
  void output(const std::string& path) { sl::add_output(manifest_, path); }

  void save() {
    sl::save_manifest(manifest_, path_);
    std::cerr << "manifest: " << path_ << "\n";
  }

 private:
  sl::RunManifest manifest_;
  std::string path_;
};

// ---------------------------------------------------------------------------
// Dataset name resolution

// A dataset flag accepts either a short name resolved against --data-dir
// (smartvote, wom, anes, anes_aggressive, smartvote_population, ...) or a
// path to a dataset JSON. ANES names expand to the scheme-variant file.
struct DataRef {
  std::string name;    // tag recorded in result rows
  std::string scheme;  // recoding tag
  std::string dataset_file;
  std::string split_file;
};

std::string default_scheme(const std::string& base) {
  if (base == "anes") return "conservative";
  if (base == "wom") return "ternary";
  return "binary";
}

DataRef resolve_dataset(const std::string& name_or_path, const std::string& scheme_flag,
                        const std::string& data_dir, const std::string& split_flag) {
  DataRef ref;
  if (name_or_path.find('/') != std::string::npos || fs::exists(name_or_path)) {
    ref.dataset_file = name_or_path;
    ref.name = fs::path(name_or_path).stem().string();
    ref.scheme = scheme_flag.empty() ? default_scheme(ref.name) : scheme_flag;
    if (!split_flag.empty()) ref.split_file = split_flag;
    return ref;
  }
  std::string base = name_or_path;
  std::string scheme = scheme_flag;
  for (const char* s : {"conservative", "aggressive"}) {
    const std::string suffix = std::string("_") + s;
    if (base.size() > suffix.size() &&
        base.compare(base.size() - suffix.size(), suffix.size(), suffix) == 0) {
      base = base.substr(0, base.size() - suffix.size());
      if (scheme.empty()) scheme = s;
    }
  }
  if (scheme.empty()) scheme = default_scheme(base);
  ref.name = name_or_path;
  ref.scheme = scheme;
  ref.dataset_file = data_dir + "/" + (base == "anes" ? "anes_" + scheme : base) + ".json";
  ref.split_file = split_flag.empty() ? data_dir + "/" + base + "_split.json" : split_flag;
  return ref;
}

sl::DataBundle load_bundle(const DataRef& ref, const std::string& arguments_path) {
  sl::DataBundle bundle;
  bundle.dataset = sl::load_dataset(ref.dataset_file);
  if (ref.split_file.empty()) {
    throw sl::ConfigError("no split file for dataset '" + ref.name +
                          "'; pass --split or use a name under --data-dir");
  }
  bundle.split = sl::load_split(ref.split_file);
  sl::validate_split(bundle.dataset, bundle.split);
  if (!arguments_path.empty()) bundle.arguments = sl::load_arguments(arguments_path);
  bundle.scheme = ref.scheme;
  return bundle;
}

// ---------------------------------------------------------------------------
// Profile flags

struct ProfileOpts {
  std::string name = "toy";
  int steps = 0, batch = 0, group = 0, warmup = 0;
  double lr = 0.0, temperature = 0.0, clip = 0.0, kl = 0.0;
  int length_target = 0;
  int sft_steps = 0, sft_batch = 0, sft_warmup = 0;
  double sft_lr = 0.0;
  int eval_runs = 0;
  double eval_temperature = 0.0;
};

void add_profile_opts(CLI::App* sub, ProfileOpts& p) {
  sub->add_option("--profile", p.name, "config profile: toy | paper")->capture_default_str();
  sub->add_option("--steps", p.steps, "GRPO steps");
  sub->add_option("--batch", p.batch, "GRPO prompts per step");
  sub->add_option("--group-size", p.group, "completions per prompt");
  sub->add_option("--lr", p.lr, "GRPO learning rate");
  sub->add_option("--warmup", p.warmup, "GRPO warmup steps");
  sub->add_option("--temperature", p.temperature, "sampling temperature");
  sub->add_option("--clip-range", p.clip, "PPO clip range");
  sub->add_option("--kl-coefficient", p.kl, "KL penalty coefficient");
  sub->add_option("--length-target", p.length_target, "reward length target (tokens)");
  sub->add_option("--sft-steps", p.sft_steps, "SFT steps");
  sub->add_option("--sft-batch", p.sft_batch, "SFT batch size");
  sub->add_option("--sft-lr", p.sft_lr, "SFT learning rate");
  sub->add_option("--sft-warmup", p.sft_warmup, "SFT warmup steps");
  sub->add_option("--eval-runs", p.eval_runs, "stochastic evaluation runs");
  sub->add_option("--eval-temperature", p.eval_temperature, "evaluation temperature");
}

sl::ExperimentProfile build_profile(const CLI::App* sub, const ProfileOpts& p) {
  sl::ExperimentProfile prof = sl::profile_by_name(p.name);
  if (sub->count("--steps")) prof.grpo.steps = p.steps;
  if (sub->count("--batch")) prof.grpo.batch_size = p.batch;
  if (sub->count("--group-size")) prof.grpo.group_size = p.group;
  if (sub->count("--lr")) prof.grpo.lr = p.lr;
  if (sub->count("--warmup")) prof.grpo.warmup_steps = p.warmup;
  if (sub->count("--temperature")) prof.grpo.temperature = p.temperature;
  if (sub->count("--clip-range")) prof.grpo.clip_range = p.clip;
  if (sub->count("--kl-coefficient")) prof.grpo.kl_coefficient = p.kl;
  if (sub->count("--length-target")) prof.grpo.length_target = p.length_target;
  if (sub->count("--sft-steps")) prof.sft.steps = p.sft_steps;
  if (sub->count("--sft-batch")) prof.sft.batch_size = p.sft_batch;
  if (sub->count("--sft-lr")) prof.sft.lr = p.sft_lr;
  if (sub->count("--sft-warmup")) prof.sft.warmup_steps = p.sft_warmup;
  if (sub->count("--eval-runs")) prof.eval_runs = p.eval_runs;
  if (sub->count("--eval-temperature")) prof.eval_temperature = p.eval_temperature;
  return prof;
}

Json profile_json(const sl::ExperimentProfile& p) {
  return Json{{"name", p.name},
              {"grpo",
               {{"steps", p.grpo.steps},
                {"batch_size", p.grpo.batch_size},
                {"group_size", p.grpo.group_size},
                {"lr", p.grpo.lr},
                {"warmup_steps", p.grpo.warmup_steps},
                {"temperature", p.grpo.temperature},
                {"clip_range", p.grpo.clip_range},
                {"kl_coefficient", p.grpo.kl_coefficient},
                {"length_target", p.grpo.length_target}}},
              {"sft",
               {{"steps", p.sft.steps},
                {"batch_size", p.sft.batch_size},
                {"lr", p.sft.lr},
                {"warmup_steps", p.sft.warmup_steps}}},
              {"eval_runs", p.eval_runs},
              {"eval_temperature", p.eval_temperature}};
}

// ---------------------------------------------------------------------------
// Endpoint parsing

struct Endpoint {
  std::string host;
  int port = 80;
  std::string path = "/complete";
};

Endpoint parse_endpoint(std::string url) {
  const auto scheme_pos = url.find("://");
  if (scheme_pos != std::string::npos) {
    if (url.substr(0, scheme_pos) != "http") {
      throw sl::ConfigError("only http endpoints are supported: " + url);
    }
    url = url.substr(scheme_pos + 3);
  }
  Endpoint ep;
  const auto slash = url.find('/');
  std::string hostport = url.substr(0, slash);
  if (slash != std::string::npos) ep.path = url.substr(slash);
  const auto colon = hostport.rfind(':');
  if (colon != std::string::npos) {
    ep.host = hostport.substr(0, colon);
    try {
      ep.port = std::stoi(hostport.substr(colon + 1));
    } catch (const std::exception&) {
      throw sl::ConfigError("bad port in endpoint: " + url);
    }
  } else {
    ep.host = hostport;
  }
  if (ep.host.empty()) throw sl::ConfigError("bad endpoint: " + url);
  return ep;
}

void append_rows(sl::ResultsStore& store, const std::vector<sl::RunScores>& scores,
                 const std::string& config_hash, const std::string& dataset,
                 const std::string& scheme, std::uint64_t seed) {
  std::vector<sl::ResultRow> rows;
  rows.reserve(scores.size());
  for (const auto& s : scores) {
    rows.push_back(sl::result_row_from_scores(s, config_hash, dataset, scheme, seed));
  }
  store.append(rows);
}

Json aggregate_json(const sl::ScoreAggregate& agg) {
  return Json{{"mean_macro_f1", agg.mean_macro_f1}, {"std_macro_f1", agg.std_macro_f1},
              {"mean_accuracy", agg.mean_accuracy}, {"std_accuracy", agg.std_accuracy},
              {"n_units", agg.n_units},             {"n_runs", agg.n_runs}};
}

// ---------------------------------------------------------------------------
// Verbs

struct IngestOpts {
  Common common;
  std::string input, output;
};

void cmd_ingest(const IngestOpts& o, const std::vector<std::string>& args) {
  const sl::Dataset ds = sl::load_dataset(o.input);
  ensure_parent(o.output);
  sl::save_dataset(ds, o.output);
  ManifestWriter mw("ingest", args, o.common);
  mw.config(Json{{"input", o.input}, {"output", o.output}});
  mw.input(o.input);
  mw.output(o.output);
  mw.save();
  std::cerr << "ingested " << sl::survey_name(ds.survey) << ": " << ds.questions.size()
            << " questions, " << ds.units.size() << " units\n";
}

struct RecodeOpts {
  Common common;
  std::string survey, scheme, input, output;
};

void cmd_recode(const RecodeOpts& o, const std::vector<std::string>& args) {
  const sl::Dataset raw = sl::load_dataset(o.input);
  sl::Dataset out;
  if (o.survey == "anes") {
    out = sl::recode_anes(raw, o.scheme);
  } else if (o.survey == "smartvote") {
    if (o.scheme != "binary") {
      throw sl::ConfigError("smartvote recoding only supports --scheme binary");
    }
    out = sl::collapse_likert(raw);
  } else {
    throw sl::ConfigError("no recoding defined for survey '" + o.survey + "'");
  }
  ensure_parent(o.output);
  sl::save_dataset(out, o.output);
  ManifestWriter mw("recode", args, o.common);
  mw.config(Json{{"survey", o.survey},
                 {"scheme", o.scheme},
                 {"input", o.input},
                 {"output", o.output}});
  mw.input(o.input);
  mw.output(o.output);
  mw.save();
  std::cerr << "recoded " << o.survey << " with scheme " << o.scheme << "\n";
}

struct SplitOpts {
  Common common;
  std::string dataset, strategy, test_ids_file, output;
  std::uint64_t seed = 0;
  std::size_t n_test = 0;
};

void cmd_split(const SplitOpts& o, const std::vector<std::string>& args) {
  const sl::Dataset ds = sl::load_dataset(o.dataset);
  sl::Split split;
  if (o.strategy == "topic_stratified") {
    split = sl::split_topic_stratified(ds, o.seed);
  } else if (o.strategy == "random") {
    if (o.n_test == 0) throw sl::ConfigError("--strategy random requires --n-test");
    split = sl::split_random(ds, o.seed, o.n_test);
  } else if (o.strategy == "fixed_external") {
    if (o.test_ids_file.empty()) {
      throw sl::ConfigError("--strategy fixed_external requires --test-ids");
    }
    Json j = Json::parse(slurp(o.test_ids_file), nullptr, false);
    if (j.is_discarded()) throw sl::DataError(o.test_ids_file + ": invalid JSON");
    if (j.is_object() && j.contains("test_ids")) j = j["test_ids"];
    if (!j.is_array()) {
      throw sl::DataError(o.test_ids_file + ": expected an array of question ids");
    }
    split = sl::split_fixed_external(ds, j.get<std::vector<std::string>>());
  } else {
    throw sl::ConfigError("unknown split strategy '" + o.strategy + "'");
  }
  sl::validate_split(ds, split);
  ensure_parent(o.output);
  sl::save_split(split, o.output);
  ManifestWriter mw("split", args, o.common);
  mw.config(Json{{"dataset", o.dataset},
                 {"strategy", o.strategy},
                 {"seed", o.seed},
                 {"n_test", o.n_test},
                 {"test_ids_file", o.test_ids_file},
                 {"output", o.output}});
  mw.input(o.dataset);
  if (!o.test_ids_file.empty()) mw.input(o.test_ids_file);
  mw.output(o.output);
  mw.save();
  std::cerr << "split " << split.train_ids.size() << " train / " << split.test_ids.size()
            << " test\n";
}

struct SftBuildOpts {
  Common common;
  std::string dataset, split_file, bias = "default", output, endpoint, model = "default";
  std::uint64_t seed = 0;
  int workers = 4;
  int timeout = 60;
};

void cmd_sft_build(const SftBuildOpts& o, const std::vector<std::string>& args) {
  const sl::Dataset ds = sl::load_dataset(o.dataset);
  std::vector<sl::Question> questions;
  if (o.split_file.empty()) {
    questions = ds.questions;
  } else {
    const sl::Split split = sl::load_split(o.split_file);
    sl::validate_split(ds, split);
    for (const auto& id : split.train_ids) questions.push_back(*ds.find_question(id));
  }
  const sl::ArgumentBias bias = sl::argument_bias_from_name(o.bias);
  std::unique_ptr<sl::HttpTextClient> client;
  if (!o.endpoint.empty()) {
    const Endpoint ep = parse_endpoint(o.endpoint);
    client = std::make_unique<sl::HttpTextClient>(ep.host, ep.port, ep.path, o.model,
                                                  o.timeout);
  }
  const auto corpus = sl::generate_argument_corpus(questions, ds.survey, ds.label_space,
                                                   bias, client.get(), o.seed, o.workers);
  ensure_parent(o.output);
  sl::save_arguments(corpus, o.output);

  std::map<std::string, int> covered;
  for (const auto& rec : corpus) covered[rec.question_id]++;
  const std::size_t uncovered = questions.size() - covered.size();
  ManifestWriter mw("sft-build", args, o.common);
  mw.config(Json{{"dataset", o.dataset},
                 {"split", o.split_file},
                 {"bias", o.bias},
                 {"seed", o.seed},
                 {"workers", o.workers},
                 {"endpoint", o.endpoint},
                 {"model", o.model},
                 {"generator", client ? "http" : "stub"},
                 {"output", o.output}});
  mw.input(o.dataset);
  if (!o.split_file.empty()) mw.input(o.split_file);
  mw.output(o.output);
  mw.save();
  std::cerr << "arguments: " << corpus.size() << " records over " << covered.size()
            << " questions";
  if (uncovered > 0) std::cerr << " (" << uncovered << " uncovered)";
  std::cerr << "\n";
}

struct TrainOpts {
  Common common;
  std::string dataset, scheme, split_file, data_dir = "data", unit, method;
  std::string backend = "toy_tabular", bias = "default", arguments, artifacts;
  double train_fraction = 1.0;
  int icl_limit = 0;
  std::uint64_t seed = 0;
  ProfileOpts profile;
};

void cmd_train(const TrainOpts& o, const CLI::App* sub,
               const std::vector<std::string>& args) {
  const DataRef ref = resolve_dataset(o.dataset, o.scheme, o.data_dir, o.split_file);
  const sl::DataBundle bundle = load_bundle(ref, o.arguments);

  sl::CellConfig cell;
  cell.dataset = ref.name;
  cell.scheme = ref.scheme;
  cell.method = o.method;
  cell.backend = o.backend;
  cell.unit_id = o.unit;
  cell.bias = sl::argument_bias_from_name(o.bias);
  cell.train_fraction = o.train_fraction;
  cell.icl_context_limit = o.icl_limit;
  cell.seed = o.seed;
  cell.profile = build_profile(sub, o.profile);

  const std::string artifacts =
      o.artifacts.empty() ? o.common.results + "/artifacts/" + ref.name : o.artifacts;
  const sl::CellOutcome outcome = sl::run_cell(bundle, cell, artifacts);
  const std::string hash = sl::cell_config_hash(cell);

  fs::create_directories(o.common.results);
  sl::ResultsStore store(o.common.results);
  append_rows(store, outcome.scores, hash, ref.name, ref.scheme, cell.seed);

  const std::string cell_dir =
      artifacts + "/" + o.unit + "/" + o.method + "/" + std::to_string(o.seed);
  ManifestWriter mw("train", args, o.common);
  mw.config_hash(hash);
  mw.config(sl::canonical_config_json(cell));
  mw.input(ref.dataset_file);
  mw.input(ref.split_file);
  if (!o.arguments.empty()) mw.input(o.arguments);
  mw.output(store.raw_path());
  if (!outcome.final_checkpoint.empty() && fs::exists(cell_dir + "/final.json")) {
    mw.output(cell_dir + "/final.json");
  }
  if (fs::exists(cell_dir + "/train_log.jsonl")) mw.output(cell_dir + "/train_log.jsonl");
  mw.save();

  Json summary{{"config_hash", hash},
               {"dataset", ref.name},
               {"scheme", ref.scheme},
               {"method", o.method},
               {"unit", o.unit},
               {"aggregate", aggregate_json(sl::aggregate_scores(outcome.scores))}};
  if (!outcome.final_checkpoint.empty()) summary["checkpoint"] = cell_dir + "/final.json";
  std::cout << summary.dump() << "\n";
}

struct EvaluateOpts {
  Common common;
  std::string dataset, scheme, split_file, data_dir = "data", unit;
  std::string method = "eval", checkpoint, backend = "toy_tabular";
  int runs = 8;
  int icl_limit = 0;
  double temperature = 1.0;
  std::uint64_t seed = 0;
};

void cmd_evaluate(const EvaluateOpts& o, const std::vector<std::string>& args) {
  const DataRef ref = resolve_dataset(o.dataset, o.scheme, o.data_dir, o.split_file);
  const sl::DataBundle bundle = load_bundle(ref, "");
  const sl::Dataset& ds = bundle.dataset;
  const sl::Unit* unit = ds.find_unit(o.unit);
  if (unit == nullptr) throw sl::ConfigError("unknown unit '" + o.unit + "'");

  std::vector<sl::RunScores> scores;
  std::string checkpoint_hash;
  if (o.method == "majority") {
    scores = sl::evaluate_majority(ds, *unit, bundle.split.train_ids,
                                   bundle.split.test_ids, o.runs);
  } else if (o.method == "random") {
    scores = sl::evaluate_random(ds, *unit, bundle.split.test_ids, o.runs, o.seed);
  } else if (o.method == "icl") {
    auto policy = sl::make_policy(o.backend, ds.label_space);
    scores = sl::evaluate_icl(*policy, ds, *unit, bundle.split.train_ids,
                              bundle.split.test_ids, o.icl_limit, o.runs, o.temperature,
                              o.seed);
  } else {
    if (o.checkpoint.empty()) {
      throw sl::ConfigError("--checkpoint is required unless --method is "
                            "majority, random, or icl");
    }
    const std::string text = slurp(o.checkpoint);
    checkpoint_hash = sl::hash_hex(sl::fnv1a64(text));
    auto policy = sl::policy_from_checkpoint(text);
    scores = sl::evaluate_unit(*policy, ds, *unit, bundle.split.test_ids, o.method,
                               o.runs, o.temperature, o.seed);
  }

  const Json cfg{{"verb", "evaluate"},
                 {"dataset", ref.name},
                 {"scheme", ref.scheme},
                 {"unit", o.unit},
                 {"method", o.method},
                 {"checkpoint_hash", checkpoint_hash},
                 {"runs", o.runs},
                 {"icl_limit", o.icl_limit},
                 {"temperature", o.temperature},
                 {"seed", o.seed}};
  const std::string hash = sl::hash_hex(sl::fnv1a64(cfg.dump()));

  fs::create_directories(o.common.results);
  sl::ResultsStore store(o.common.results);
  append_rows(store, scores, hash, ref.name, ref.scheme, o.seed);

  ManifestWriter mw("evaluate", args, o.common);
  mw.config_hash(hash);
  mw.config(cfg);
  mw.input(ref.dataset_file);
  mw.input(ref.split_file);
  if (!o.checkpoint.empty()) mw.input(o.checkpoint);
  mw.output(store.raw_path());
  mw.save();

  std::cout << Json{{"config_hash", hash},
                    {"dataset", ref.name},
                    {"method", o.method},
                    {"unit", o.unit},
                    {"aggregate", aggregate_json(sl::aggregate_scores(scores))}}
                   .dump()
            << "\n";
}

struct PcaOpts {
  Common common;
  std::string dataset, humans, questions_file, model_in, model_out, points_out;
  std::string agent_checkpoints, conservative_party = "SVP", fit_kind = "population";
};

std::optional<std::vector<double>> stance_vector(
    const std::vector<std::string>& column_ids,
    const std::map<std::string, sl::Stance>& responses) {
  std::vector<double> v;
  v.reserve(column_ids.size());
  for (const auto& id : column_ids) {
    const auto it = responses.find(id);
    if (it == responses.end()) return std::nullopt;
    if (it->second == sl::Stance::Yes) {
      v.push_back(1.0);
    } else if (it->second == sl::Stance::No) {
      v.push_back(0.0);
    } else {
      return std::nullopt;
    }
  }
  return v;
}

void cmd_analyze_pca(const PcaOpts& o, const std::vector<std::string>& args) {
  const sl::Dataset ds = sl::load_dataset(o.dataset);
  std::vector<std::string> qids;
  if (o.questions_file.empty()) {
    for (const auto& q : ds.questions) qids.push_back(q.id);
  } else {
    Json j = Json::parse(slurp(o.questions_file), nullptr, false);
    if (j.is_discarded() || !j.is_array()) {
      throw sl::DataError(o.questions_file + ": expected a JSON array of question ids");
    }
    qids = j.get<std::vector<std::string>>();
  }

  sl::SpaceModel model;
  std::vector<sl::SpacePointRecord> points;
  if (!o.model_in.empty()) {
    model = sl::load_space_model(o.model_in);
  } else {
    const sl::AnswerMatrixBuild build = sl::build_answer_matrix(ds, qids);
    for (const auto& id : build.excluded_ids) {
      std::cerr << "excluded (gaps): " << id << "\n";
    }
    sl::OrientationHints hints;
    for (std::size_t r = 0; r < build.matrix.row_ids.size(); ++r) {
      const sl::Unit* u = ds.find_unit(build.matrix.row_ids[r]);
      if (u == nullptr) continue;
      if (u->group == sl::Group::Right) hints.right_rows.push_back(r);
      if (u->party_or_ideology == o.conservative_party) {
        hints.conservative_rows.push_back(r);
      }
    }
    model = sl::fit_space(build.matrix, hints);
    if (!o.model_out.empty()) {
      ensure_parent(o.model_out);
      sl::save_space_model(model, o.model_out);
    }
  }

  auto project_units = [&](const sl::Dataset& src, const std::string& kind) {
    for (const auto& u : src.units) {
      const auto v = stance_vector(model.column_ids, u.responses);
      if (!v) {
        std::cerr << "skipped " << kind << " " << u.unit_id << " (gaps or neutral)\n";
        continue;
      }
      const sl::Point p = sl::project(model, *v);
      points.push_back({u.unit_id, kind, p.x, p.y, sl::group_name(u.group)});
    }
  };
  if (!o.points_out.empty()) {
    project_units(ds, o.fit_kind);
    std::optional<sl::Dataset> humans;
    if (!o.humans.empty()) {
      humans = sl::load_dataset(o.humans);
      project_units(*humans, "human");
    }
    if (!o.agent_checkpoints.empty()) {
      if (!humans) {
        throw sl::ConfigError("--agent-checkpoints requires --humans for unit lookup");
      }
      Json m = Json::parse(slurp(o.agent_checkpoints), nullptr, false);
      if (m.is_discarded() || !m.is_object()) {
        throw sl::DataError(o.agent_checkpoints +
                            ": expected {unit_id: checkpoint path}");
      }
      for (const auto& [unit_id, path] : m.items()) {
        const sl::Unit* u = humans->find_unit(unit_id);
        if (u == nullptr) throw sl::ConfigError("unknown unit '" + unit_id + "'");
        auto policy = sl::policy_from_checkpoint(slurp(path.get<std::string>()));
        const auto preds =
            sl::greedy_predictions(*policy, *humans, *u, model.column_ids);
        const auto v = stance_vector(model.column_ids, preds);
        if (!v) {
          std::cerr << "skipped agent " << unit_id << " (gaps or neutral)\n";
          continue;
        }
        const sl::Point p = sl::project(model, *v);
        points.push_back({unit_id, "agent", p.x, p.y, sl::group_name(u->group)});
      }
    }
    ensure_parent(o.points_out);
    sl::save_space_points(points, o.points_out);
  }

  ManifestWriter mw("analyze-pca", args, o.common);
  mw.config(Json{{"dataset", o.dataset},
                 {"humans", o.humans},
                 {"questions", o.questions_file},
                 {"model_in", o.model_in},
                 {"model_out", o.model_out},
                 {"points_out", o.points_out},
                 {"agent_checkpoints", o.agent_checkpoints},
                 {"conservative_party", o.conservative_party},
                 {"fit_kind", o.fit_kind}});
  mw.input(o.dataset);
  if (!o.humans.empty()) mw.input(o.humans);
  if (!o.questions_file.empty()) mw.input(o.questions_file);
  if (!o.model_in.empty()) mw.input(o.model_in);
  if (!o.model_out.empty() && o.model_in.empty()) mw.output(o.model_out);
  if (!o.points_out.empty()) mw.output(o.points_out);
  mw.save();

  std::cout << Json{{"columns", model.column_ids.size()},
                    {"explained_fraction",
                     {model.explained_fraction[0], model.explained_fraction[1]}},
                    {"points", points.size()}}
                   .dump()
            << "\n";
}

struct ExperimentOpts {
  Common common;
  std::string matrix_file, name, data_dir = "data", dataset, scheme, split_file;
  std::string model_file, backend = "toy_tabular", output;
  std::string arguments_default, arguments_progressive, arguments_conservative;
  std::vector<double> fractions{0.1, 0.25, 0.5, 0.75, 1.0};
  std::uint64_t seed = 0;
  int workers = 0;
  ProfileOpts profile;
};

void cmd_experiment(const ExperimentOpts& o, const CLI::App* sub,
                    const std::vector<std::string>& args) {
  fs::create_directories(o.common.results);
  sl::ResultsStore store(o.common.results);
  ManifestWriter mw("experiment", args, o.common);

  if (!o.matrix_file.empty()) {
    sl::MatrixSpec spec = sl::parse_matrix_file(o.matrix_file);
    if (sub->count("--workers")) spec.workers = o.workers;
    if (sub->count("--seed")) spec.seed = o.seed;
    std::map<std::string, sl::DataBundle> bundles;
    std::vector<std::string> inputs;
    for (const auto& name : spec.datasets) {
      const DataRef ref = resolve_dataset(name, "", o.data_dir, "");
      bundles.emplace(name, load_bundle(ref, ""));
      inputs.push_back(ref.dataset_file);
      inputs.push_back(ref.split_file);
    }
    const std::string artifacts = o.common.results + "/artifacts";
    const sl::MatrixSummary summary =
        sl::run_method_matrix(bundles, spec, store, artifacts);
    const std::string canonical = o.common.results + "/results_canonical.jsonl";
    const std::string csv = o.common.results + "/results.csv";
    store.write_canonical(canonical);
    store.write_csv(csv);

    mw.config(Json{{"matrix", o.matrix_file},
                   {"datasets", spec.datasets},
                   {"methods", spec.methods},
                   {"units", spec.units},
                   {"backend", spec.backend},
                   {"profile", spec.profile},
                   {"seed", spec.seed},
                   {"bias", spec.bias},
                   {"train_fraction", spec.train_fraction},
                   {"icl_context_limit", spec.icl_context_limit},
                   {"workers", spec.workers}});
    mw.input(o.matrix_file);
    for (const auto& p : inputs) mw.input(p);
    mw.output(store.raw_path());
    mw.output(canonical);
    mw.output(csv);
    mw.save();

    const auto violations = store.determinism_violations();
    for (const auto& h : violations) {
      std::cerr << "determinism violation for config " << h << "\n";
    }
    std::cout << Json{{"ran", summary.ran},
                      {"skipped", summary.skipped},
                      {"failed", summary.failed}}
                     .dump()
              << "\n";
    if (summary.failed > 0 || !violations.empty()) {
      throw sl::TrainingError("experiment matrix had failures");
    }
    return;
  }

  if (o.name.empty()) {
    throw sl::ConfigError("experiment needs --matrix or --name");
  }
  const sl::ExperimentProfile profile = build_profile(sub, o.profile);
  const std::string out_dir = o.common.results + "/experiments";
  fs::create_directories(out_dir);

  Json cfg{{"name", o.name},       {"backend", o.backend},
           {"seed", o.seed},       {"profile", profile_json(profile)},
           {"dataset", o.dataset}, {"scheme", o.scheme}};

  if (o.name == "bias") {
    const DataRef ref = resolve_dataset(o.dataset, o.scheme, o.data_dir, o.split_file);
    const sl::DataBundle bundle = load_bundle(ref, o.arguments_default);
    const sl::SpaceModel model = sl::load_space_model(o.model_file);
    std::map<std::string, std::vector<sl::ArgumentRecord>> corpora;
    if (!o.arguments_default.empty()) {
      corpora["default"] = sl::load_arguments(o.arguments_default);
      if (o.arguments_progressive.empty() || o.arguments_conservative.empty()) {
        throw sl::ConfigError("bias corpora must cover all three tags");
      }
      corpora["progressive"] = sl::load_arguments(o.arguments_progressive);
      corpora["conservative"] = sl::load_arguments(o.arguments_conservative);
    }
    const sl::BiasReport report = sl::run_bias_experiment(bundle, model, corpora,
                                                          o.backend, profile, o.seed);
    const std::string out = o.output.empty() ? out_dir + "/bias.json" : o.output;
    ensure_parent(out);
    sl::save_bias_report(report, out);
    mw.config(cfg);
    mw.input(ref.dataset_file);
    mw.input(ref.split_file);
    mw.input(o.model_file);
    mw.output(out);
    mw.save();
    std::cout << Json{{"cells", report.cells.size()},
                      {"displacements", report.displacements.size()},
                      {"output", out}}
                     .dump()
              << "\n";
  } else if (o.name == "inversion") {
    const DataRef ref = resolve_dataset(o.dataset, o.scheme, o.data_dir, o.split_file);
    const sl::DataBundle bundle = load_bundle(ref, "");
    const sl::SpaceModel model = sl::load_space_model(o.model_file);
    const auto rows =
        sl::run_inversion_experiment(bundle, model, o.backend, profile, o.seed);
    const std::string out = o.output.empty() ? out_dir + "/inversion.json" : o.output;
    ensure_parent(out);
    sl::save_inversion_rows(rows, out);
    mw.config(cfg);
    mw.input(ref.dataset_file);
    mw.input(ref.split_file);
    mw.input(o.model_file);
    mw.output(out);
    mw.save();
    std::cout << Json{{"units", rows.size()}, {"output", out}}.dump() << "\n";
  } else if (o.name == "trainsize") {
    const DataRef ref = resolve_dataset(o.dataset, o.scheme, o.data_dir, o.split_file);
    const sl::DataBundle bundle = load_bundle(ref, "");
    const auto rows = sl::run_trainsize_ablation(bundle, o.fractions, o.backend,
                                                 profile, o.seed);
    const std::string out = o.output.empty() ? out_dir + "/trainsize.json" : o.output;
    ensure_parent(out);
    sl::save_trainsize_rows(rows, out);
    cfg["fractions"] = o.fractions;
    mw.config(cfg);
    mw.input(ref.dataset_file);
    mw.input(ref.split_file);
    mw.output(out);
    mw.save();
    std::cout << Json{{"rows", rows.size()}, {"output", out}}.dump() << "\n";
  } else if (o.name == "recoding") {
    const std::string base = o.dataset.empty() ? "anes" : o.dataset;
    const DataRef cons_ref = resolve_dataset(base, "conservative", o.data_dir, o.split_file);
    const DataRef aggr_ref = resolve_dataset(base, "aggressive", o.data_dir, o.split_file);
    const sl::DataBundle cons = load_bundle(cons_ref, "");
    const sl::DataBundle aggr = load_bundle(aggr_ref, "");
    const auto outcomes =
        sl::run_recoding_comparison(cons, aggr, o.backend, profile, o.seed);
    std::vector<sl::SchemeSummary> summaries;
    for (const auto& oc : outcomes) {
      summaries.push_back(sl::scheme_summary(oc));
      Json row_cfg = cfg;
      row_cfg["scheme"] = oc.scheme;
      append_rows(store, oc.runs, sl::hash_hex(sl::fnv1a64(row_cfg.dump())), base,
                  oc.scheme, o.seed);
    }
    const std::string out = o.output.empty() ? out_dir + "/recoding.json" : o.output;
    ensure_parent(out);
    sl::save_scheme_summaries(summaries, out);
    mw.config(cfg);
    mw.input(cons_ref.dataset_file);
    mw.input(aggr_ref.dataset_file);
    mw.input(cons_ref.split_file);
    mw.output(out);
    mw.output(store.raw_path());
    mw.save();
    std::cout << Json{{"schemes", summaries.size()}, {"output", out}}.dump() << "\n";
  } else {
    throw sl::ConfigError("unknown experiment '" + o.name +
                          "' (bias | inversion | trainsize | recoding)");
  }
}

struct ReportOpts {
  Common common;
  std::string layout, out_dir, reference, points_file, dataset_file;
  std::string dataset = "anes", scheme = "conservative", method = "sft+grpo";
  std::string bias_report, inversion, trainsize, schemes;
};

void cmd_report(const ReportOpts& o, const std::vector<std::string>& args) {
  const std::string out =
      o.out_dir.empty() ? o.common.results + "/reports/" + o.layout : o.out_dir;
  fs::create_directories(out);
  sl::ResultsStore store(o.common.results);

  ManifestWriter mw("report", args, o.common);
  mw.config(Json{{"layout", o.layout},
                 {"out_dir", out},
                 {"dataset", o.dataset},
                 {"scheme", o.scheme},
                 {"method", o.method}});

  auto store_rows = [&]() {
    mw.input(store.raw_path());
    return store.load();
  };

  sl::ReportFiles files;
  if (o.layout == "table3" || o.layout == "table4") {
    std::vector<sl::ReferenceScore> reference;
    if (!o.reference.empty()) {
      reference = sl::load_reference_scores(o.reference);
      mw.input(o.reference);
    }
    files = o.layout == "table3" ? sl::report_table3(store_rows(), reference, out)
                                 : sl::report_table4(store_rows(), reference, out);
  } else if (o.layout == "table8") {
    files = sl::report_table8(store_rows(), out);
  } else if (o.layout == "table11") {
    std::vector<sl::RegressionPoint> points;
    if (!o.points_file.empty()) {
      points = sl::load_regression_points(o.points_file);
      mw.input(o.points_file);
    } else {
      points = sl::regression_points(store_rows(), o.dataset, o.scheme, o.method);
    }
    files = sl::report_table11(points, out);
  } else if (o.layout == "fig2") {
    if (o.points_file.empty()) throw sl::ConfigError("fig2 requires --points");
    files = sl::report_fig2(sl::load_space_points(o.points_file), out);
    mw.input(o.points_file);
  } else if (o.layout == "fig3") {
    if (o.dataset_file.empty()) throw sl::ConfigError("fig3 requires --dataset-file");
    const sl::Dataset ds = sl::load_dataset(o.dataset_file);
    files = sl::report_fig3(store_rows(), ds, out);
    mw.input(o.dataset_file);
  } else if (o.layout == "fig4") {
    files = sl::report_fig4(store_rows(), o.dataset, o.scheme, o.method, out);
  } else if (o.layout == "fig5" || o.layout == "fig6") {
    if (o.bias_report.empty()) {
      throw sl::ConfigError(o.layout + " requires --bias-report");
    }
    const sl::BiasReport report = sl::load_bias_report(o.bias_report);
    files = o.layout == "fig5" ? sl::report_fig5(report, out)
                               : sl::report_fig6(report, out);
    mw.input(o.bias_report);
  } else if (o.layout == "fig7") {
    if (o.inversion.empty()) throw sl::ConfigError("fig7 requires --inversion");
    files = sl::report_fig7(sl::load_inversion_rows(o.inversion), out);
    mw.input(o.inversion);
  } else if (o.layout == "fig10") {
    if (o.schemes.empty()) throw sl::ConfigError("fig10 requires --schemes");
    files = sl::report_fig10(sl::load_scheme_summaries(o.schemes), out);
    mw.input(o.schemes);
  } else if (o.layout == "fig11") {
    if (o.trainsize.empty()) throw sl::ConfigError("fig11 requires --trainsize");
    files = sl::report_fig11(sl::load_trainsize_rows(o.trainsize), out);
    mw.input(o.trainsize);
  } else {
    throw sl::ConfigError("unknown layout '" + o.layout + "'");
  }

  for (const auto& p : files.paths) mw.output(p);
  mw.save();
  for (const auto& p : files.paths) std::cout << p << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"survey persona training, evaluation, and reporting"};
  app.require_subcommand(1);

  std::vector<std::string> args(argv + 1, argv + argc);

  IngestOpts ingest;
  auto* sub_ingest = app.add_subcommand("ingest", "validate and normalize a survey file");
  add_common(sub_ingest, ingest.common);
  sub_ingest->add_option("--input", ingest.input, "survey JSON to read")
      ->required()
      ->check(CLI::ExistingFile);
  sub_ingest->add_option("--output", ingest.output, "canonical JSON to write")->required();

  RecodeOpts recode;
  auto* sub_recode = app.add_subcommand("recode", "apply a recoding scheme");
  add_common(sub_recode, recode.common);
  sub_recode->add_option("--survey", recode.survey, "survey family: anes | smartvote")
      ->required();
  sub_recode->add_option("--scheme", recode.scheme,
                         "conservative | aggressive | binary")
      ->required();
  sub_recode->add_option("--input", recode.input, "raw dataset JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sub_recode->add_option("--output", recode.output, "recoded dataset JSON")->required();

  SplitOpts split;
  auto* sub_split = app.add_subcommand("split", "derive a train/test split");
  add_common(sub_split, split.common);
  sub_split->add_option("--dataset", split.dataset, "dataset JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sub_split
      ->add_option("--strategy", split.strategy,
                   "topic_stratified | random | fixed_external")
      ->required();
  sub_split->add_option("--seed", split.seed, "split seed");
  sub_split->add_option("--n-test", split.n_test, "test question count (random)");
  sub_split->add_option("--test-ids", split.test_ids_file,
                        "JSON array of test ids (fixed_external)");
  sub_split->add_option("--output", split.output, "split JSON to write")->required();

  SftBuildOpts sft_build;
  auto* sub_sft = app.add_subcommand("sft-build", "generate an argument corpus");
  add_common(sub_sft, sft_build.common);
  sub_sft->add_option("--dataset", sft_build.dataset, "dataset JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sub_sft->add_option("--split", sft_build.split_file,
                      "restrict to the split's train questions");
  sub_sft->add_option("--bias", sft_build.bias,
                      "default | progressive | conservative")
      ->capture_default_str();
  sub_sft->add_option("--seed", sft_build.seed, "generation seed");
  sub_sft->add_option("--workers", sft_build.workers, "in-flight generation requests")
      ->envname("STANCELAB_WORKERS")
      ->capture_default_str();
  sub_sft->add_option("--endpoint", sft_build.endpoint,
                      "http text endpoint; stub generator when absent")
      ->envname("STANCELAB_LM_ENDPOINT");
  sub_sft->add_option("--model", sft_build.model, "model name sent to the endpoint")
      ->capture_default_str();
  sub_sft->add_option("--timeout", sft_build.timeout, "endpoint timeout, seconds")
      ->capture_default_str();
  sub_sft->add_option("--output", sft_build.output, "argument JSONL to write")->required();

  TrainOpts train;
  auto* sub_train = app.add_subcommand("train", "train and evaluate one unit");
  add_common(sub_train, train.common);
  sub_train->add_option("--dataset", train.dataset, "dataset name or JSON path")
      ->required();
  sub_train->add_option("--scheme", train.scheme, "recoding scheme tag");
  sub_train->add_option("--split", train.split_file, "split JSON path");
  sub_train->add_option("--data-dir", train.data_dir, "directory for dataset names")
      ->capture_default_str();
  sub_train->add_option("--unit", train.unit, "unit id to model")->required();
  sub_train
      ->add_option("--method", train.method,
                   "majority | random | icl | sft | grpo | sft+grpo")
      ->required();
  sub_train->add_option("--backend", train.backend, "policy backend")
      ->capture_default_str();
  sub_train->add_option("--bias", train.bias, "argument corpus bias tag")
      ->capture_default_str();
  sub_train->add_option("--arguments", train.arguments, "argument JSONL for SFT");
  sub_train->add_option("--artifacts", train.artifacts, "checkpoint/log directory");
  sub_train
      ->add_option("--train-fraction", train.train_fraction, "fraction of train questions")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sub_train->add_option("--icl-limit", train.icl_limit, "ICL demonstration cap");
  sub_train->add_option("--seed", train.seed, "cell seed");
  add_profile_opts(sub_train, train.profile);

  EvaluateOpts evaluate;
  auto* sub_eval = app.add_subcommand("evaluate", "score a unit or a checkpoint");
  add_common(sub_eval, evaluate.common);
  sub_eval->add_option("--dataset", evaluate.dataset, "dataset name or JSON path")
      ->required();
  sub_eval->add_option("--scheme", evaluate.scheme, "recoding scheme tag");
  sub_eval->add_option("--split", evaluate.split_file, "split JSON path");
  sub_eval->add_option("--data-dir", evaluate.data_dir, "directory for dataset names")
      ->capture_default_str();
  sub_eval->add_option("--unit", evaluate.unit, "unit id")->required();
  sub_eval->add_option("--method", evaluate.method,
                       "row label; majority | random | icl run without a checkpoint")
      ->capture_default_str();
  sub_eval->add_option("--checkpoint", evaluate.checkpoint, "checkpoint JSON path");
  sub_eval->add_option("--backend", evaluate.backend, "policy backend for icl")
      ->capture_default_str();
  sub_eval->add_option("--runs", evaluate.runs, "stochastic runs")->capture_default_str();
  sub_eval->add_option("--icl-limit", evaluate.icl_limit, "ICL demonstration cap");
  sub_eval->add_option("--temperature", evaluate.temperature, "sampling temperature")
      ->capture_default_str();
  sub_eval->add_option("--seed", evaluate.seed, "evaluation seed");

  PcaOpts pca;
  auto* sub_pca = app.add_subcommand("analyze-pca", "fit and project the opinion space");
  add_common(sub_pca, pca.common);
  sub_pca->add_option("--dataset", pca.dataset, "dataset JSON to fit or project")
      ->required()
      ->check(CLI::ExistingFile);
  sub_pca->add_option("--humans", pca.humans, "dataset JSON projected as humans")
      ->check(CLI::ExistingFile);
  sub_pca->add_option("--questions", pca.questions_file,
                      "JSON array restricting the columns");
  sub_pca->add_option("--model-in", pca.model_in, "reuse a fitted space model");
  sub_pca->add_option("--model-out", pca.model_out, "space model JSON to write");
  sub_pca->add_option("--points-out", pca.points_out, "projected points JSON to write");
  sub_pca->add_option("--agent-checkpoints", pca.agent_checkpoints,
                      "JSON {unit_id: checkpoint path} projected as agents");
  sub_pca
      ->add_option("--conservative-party", pca.conservative_party,
                   "party anchoring the second axis")
      ->capture_default_str();
  sub_pca->add_option("--fit-kind", pca.fit_kind, "kind tag for the fit dataset's rows")
      ->capture_default_str();

  ExperimentOpts experiment;
  auto* sub_exp = app.add_subcommand("experiment", "run a matrix or a named experiment");
  add_common(sub_exp, experiment.common);
  sub_exp->add_option("--matrix", experiment.matrix_file,
                      "matrix spec (.json or key=value .toml)");
  sub_exp->add_option("--name", experiment.name,
                      "bias | inversion | trainsize | recoding");
  sub_exp->add_option("--data-dir", experiment.data_dir, "directory for dataset names")
      ->capture_default_str();
  sub_exp->add_option("--dataset", experiment.dataset, "dataset for named experiments");
  sub_exp->add_option("--scheme", experiment.scheme, "recoding scheme tag");
  sub_exp->add_option("--split", experiment.split_file, "split JSON path");
  sub_exp->add_option("--model", experiment.model_file,
                      "space model JSON (bias, inversion)");
  sub_exp->add_option("--backend", experiment.backend, "policy backend")
      ->capture_default_str();
  sub_exp->add_option("--output", experiment.output, "named experiment output path");
  sub_exp->add_option("--arguments-default", experiment.arguments_default,
                      "default-bias argument corpus");
  sub_exp->add_option("--arguments-progressive", experiment.arguments_progressive,
                      "progressive-bias argument corpus");
  sub_exp->add_option("--arguments-conservative", experiment.arguments_conservative,
                      "conservative-bias argument corpus");
  sub_exp->add_option("--fractions", experiment.fractions, "trainsize fractions")
      ->delimiter(',')
      ->capture_default_str();
  sub_exp->add_option("--seed", experiment.seed, "experiment seed");
  sub_exp->add_option("--workers", experiment.workers, "matrix worker threads")
      ->envname("STANCELAB_WORKERS");
  add_profile_opts(sub_exp, experiment.profile);

  ReportOpts report;
  auto* sub_report = app.add_subcommand("report", "render tables and figures");
  add_common(sub_report, report.common);
  sub_report
      ->add_option("--layout", report.layout,
                   "table3 | table4 | table8 | table11 | fig2 | fig3 | fig4 | fig5 | "
                   "fig6 | fig7 | fig10 | fig11")
      ->required();
  sub_report->add_option("--out", report.out_dir, "output directory");
  sub_report->add_option("--reference", report.reference,
                         "reference score JSON (table3, table4)");
  sub_report->add_option("--points", report.points_file,
                         "points JSON (fig2: space points; table11: regression points)");
  sub_report->add_option("--dataset-file", report.dataset_file, "dataset JSON (fig3)");
  sub_report->add_option("--dataset", report.dataset, "store dataset tag")
      ->capture_default_str();
  sub_report->add_option("--scheme", report.scheme, "store scheme tag")
      ->capture_default_str();
  sub_report->add_option("--method", report.method, "store method tag")
      ->capture_default_str();
  sub_report->add_option("--bias-report", report.bias_report, "bias JSON (fig5, fig6)");
  sub_report->add_option("--inversion", report.inversion, "inversion JSON (fig7)");
  sub_report->add_option("--trainsize", report.trainsize, "trainsize JSON (fig11)");
  sub_report->add_option("--schemes", report.schemes, "scheme summary JSON (fig10)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // help text on stdout, exit 0
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help() << "\n";
    return 1;
  }

  try {
    if (sub_ingest->parsed()) {
      cmd_ingest(ingest, args);
    } else if (sub_recode->parsed()) {
      cmd_recode(recode, args);
    } else if (sub_split->parsed()) {
      cmd_split(split, args);
    } else if (sub_sft->parsed()) {
      cmd_sft_build(sft_build, args);
    } else if (sub_train->parsed()) {
      cmd_train(train, sub_train, args);
    } else if (sub_eval->parsed()) {
      cmd_evaluate(evaluate, args);
    } else if (sub_pca->parsed()) {
      cmd_analyze_pca(pca, args);
    } else if (sub_exp->parsed()) {
      cmd_experiment(experiment, sub_exp, args);
    } else if (sub_report->parsed()) {
      cmd_report(report, args);
    }
  } catch (const sl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const sl::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
