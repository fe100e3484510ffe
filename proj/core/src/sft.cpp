#include "stancelab/sft.hpp"

#include <atomic>
#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>

#include "json_util.hpp"
#include "stancelab/errors.hpp"
#include "stancelab/grpo.hpp"
#include "stancelab/rng.hpp"
#include "stancelab/schema.hpp"

#define CPPHTTPLIB_NO_EXCEPTIONS
#include "httplib.h"

namespace stancelab {

using detail::Json;

std::string argument_origin_name(ArgumentOrigin o) {
  return o == ArgumentOrigin::Generated ? "generated" : "stub";
}

ArgumentOrigin argument_origin_from_name(const std::string& name) {
  if (name == "generated") return ArgumentOrigin::Generated;
  if (name == "stub") return ArgumentOrigin::Stub;
  throw DataError("unknown argument origin '" + name + "'");
}

void save_arguments(const std::vector<ArgumentRecord>& records, const std::string& path) {
  std::ostringstream out;
  for (const auto& r : records) {
    Json j;
    j["question_id"] = r.question_id;
    j["stance"] = stance_label(r.stance);
    j["argument_text"] = r.argument_text;
    j["bias_tag"] = argument_bias_name(r.bias_tag);
    j["origin"] = argument_origin_name(r.origin);
    out << j.dump() << "\n";
  }
  detail::write_text_file(path, out.str());
}

std::vector<ArgumentRecord> load_arguments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open argument file '" + path + "'");
  std::vector<ArgumentRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const Json j = detail::parse_json(line, path + ":" + std::to_string(line_no));
    ArgumentRecord r;
    r.question_id = detail::require(j, "question_id", path).get<std::string>();
    const auto stance = stance_from_label(detail::require(j, "stance", path).get<std::string>());
    if (!stance) throw DataError(path + ": bad stance label");
    r.stance = *stance;
    r.argument_text = detail::require(j, "argument_text", path).get<std::string>();
    if (r.argument_text.empty()) throw DataError(path + ": empty argument_text");
    r.bias_tag = argument_bias_from_name(detail::require(j, "bias_tag", path).get<std::string>());
    r.origin = argument_origin_from_name(detail::require(j, "origin", path).get<std::string>());
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// HttpTextClient

struct HttpTextClient::Impl {
  httplib::Client client;
  std::string path;
  std::string model;

  Impl(const std::string& host, int port, std::string p, std::string m, int timeout)
      : client(host, port), path(std::move(p)), model(std::move(m)) {
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
  }
};

HttpTextClient::HttpTextClient(std::string host, int port, std::string path,
                               std::string model, int timeout_seconds)
    : impl_(std::make_unique<Impl>(host, port, std::move(path), std::move(model),
                                   timeout_seconds)) {}
HttpTextClient::~HttpTextClient() = default;

std::string HttpTextClient::complete(const std::string& prompt) {
  Json body;
  body["model"] = impl_->model;
  body["prompt"] = prompt;
  auto res = impl_->client.Post(impl_->path, body.dump(), "application/json");
  if (!res || res->status != 200) {
    throw RemoteError("argument generation request failed" +
                      (res ? " with status " + std::to_string(res->status) : ""));
  }
  const Json j = detail::parse_json(res->body, "generation response");
  return detail::require(j, "text", "generation response").get<std::string>();
}

// ---------------------------------------------------------------------------
// Generation

namespace {

const char* kForTemplates[5] = {
    "Backing this delivers concrete gains where the issue says \"%s\".",
    "On \"%s\", moving forward is the fair and forward looking choice.",
    "Supporting \"%s\" strengthens trust in institutions over the long run.",
    "The practical benefits of \"%s\" clearly outweigh the transition costs.",
    "Saying yes to \"%s\" keeps policy aligned with everyday needs.",
};

const char* kAgainstTemplates[5] = {
    "Rejecting this avoids real harm where the issue says \"%s\".",
    "On \"%s\", the burden falls on those least able to carry it.",
    "Opposing \"%s\" protects both budgets and basic freedoms.",
    "The risks hidden in \"%s\" outweigh any promised upside.",
    "Saying no to \"%s\" leaves room for a better designed alternative.",
};

const char* kNeutralTemplates[5] = {
    "On \"%s\" the evidence cuts both ways, so neutrality is defensible.",
    "Remaining undecided on \"%s\" respects how finely balanced it is.",
    "\"%s\" mixes valid goals with real costs; neither side convinces.",
    "Withholding judgment on \"%s\" until details firm up is prudent.",
    "Both camps on \"%s\" overstate their case; staying neutral is honest.",
};

std::string fill_template(const char* tpl, const std::string& question) {
  const std::string t(tpl);
  const auto pos = t.find("%s");
  return t.substr(0, pos) + question + t.substr(pos + 2);
}

std::string bias_prefix(ArgumentBias bias) {
  switch (bias) {
    case ArgumentBias::Progressive: return "From a progressive standpoint: ";
    case ArgumentBias::Conservative: return "From a conservative standpoint: ";
    default: return "";
  }
}

std::vector<std::string> stub_arguments(const Question& question, ArgumentSide side,
                                        ArgumentBias bias, std::uint64_t seed) {
  const char* const* bank = nullptr;
  switch (side) {
    case ArgumentSide::For: bank = kForTemplates; break;
    case ArgumentSide::Against: bank = kAgainstTemplates; break;
    case ArgumentSide::Neutral: bank = kNeutralTemplates; break;
  }
  Rng rng(Rng::derive(seed, "args:" + question.id + ":" + argument_side_name(side) + ":" +
                                argument_bias_name(bias)));
  const int n = 3 + static_cast<int>(rng.next_below(3));
  std::vector<std::size_t> order{0, 1, 2, 3, 4};
  rng.shuffle(order);
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(bias_prefix(bias) + fill_template(bank[order[i]], question.text));
  }
  return out;
}

std::string strip_list_marker(const std::string& line) {
  std::size_t i = 0;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  if (i < line.size() && (line[i] == '-' || line[i] == '*')) {
    ++i;
  } else {
    std::size_t j = i;
    while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i && j < line.size() && (line[j] == '.' || line[j] == ')')) i = j + 1;
  }
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  std::size_t end = line.size();
  while (end > i && std::isspace(static_cast<unsigned char>(line[end - 1]))) --end;
  return line.substr(i, end - i);
}

std::vector<std::string> split_completion(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string arg = strip_list_marker(line);
    if (!arg.empty()) out.push_back(std::move(arg));
    if (out.size() == 5) break;
  }
  return out;
}

}  // namespace

std::vector<ArgumentRecord> generate_arguments(const Question& question, SurveyKind survey,
                                               ArgumentSide side, ArgumentBias bias,
                                               TextClient* client, std::uint64_t seed,
                                               int retries) {
  const Stance stance = stance_for_side(side);
  std::vector<ArgumentRecord> out;
  if (client == nullptr) {
    for (auto& text : stub_arguments(question, side, bias, seed)) {
      out.push_back({question.id, stance, std::move(text), bias, ArgumentOrigin::Stub});
    }
    return out;
  }
  const std::string prompt = argument_prompt(survey, side, bias, question.text);
  for (int attempt = 0; attempt <= retries; ++attempt) {
    try {
      const auto args = split_completion(client->complete(prompt));
      if (args.empty()) continue;  // unparsable completion counts as a failed attempt
      for (const auto& text : args) {
        out.push_back({question.id, stance, text, bias, ArgumentOrigin::Generated});
      }
      return out;
    } catch (const RemoteError&) {
      // retry; fall through to uncovered after the last attempt
    }
  }
  return {};
}

std::vector<ArgumentRecord> generate_argument_corpus(
    const std::vector<Question>& questions, SurveyKind survey, const LabelSpace& space,
    ArgumentBias bias, TextClient* client, std::uint64_t seed, int workers) {
  if (workers < 1) throw ConfigError("generate_argument_corpus: workers must be positive");
  std::vector<std::vector<ArgumentRecord>> slots(questions.size());

  auto run_one = [&](std::size_t i) {
    for (Stance s : space.stances()) {
      auto recs =
          generate_arguments(questions[i], survey, side_for_stance(s), bias, client, seed);
      slots[i].insert(slots[i].end(), recs.begin(), recs.end());
    }
  };

  if (client == nullptr || workers == 1 || questions.size() < 2) {
    for (std::size_t i = 0; i < questions.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    const int n_threads = std::min<int>(workers, static_cast<int>(questions.size()));
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < questions.size();
             i = next.fetch_add(1)) {
          run_one(i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<ArgumentRecord> out;
  for (auto& slot : slots) {
    out.insert(out.end(), std::make_move_iterator(slot.begin()),
               std::make_move_iterator(slot.end()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus + training

std::vector<SftExample> build_sft_corpus(const Dataset& dataset, const Unit& unit,
                                         const std::vector<std::string>& train_ids,
                                         const std::vector<ArgumentRecord>& arguments) {
  std::vector<SftExample> corpus;
  std::vector<std::string> uncovered;
  for (const auto& qid : train_ids) {
    const Question* q = dataset.find_question(qid);
    if (q == nullptr) throw DataError("build_sft_corpus: unknown question '" + qid + "'");
    auto resp = unit.responses.find(qid);
    if (resp == unit.responses.end()) continue;  // unit skipped this question
    const Stance truth = resp->second;
    const PromptSpec prompt = build_prompt(unit.country, *q, dataset.label_space);

    auto comment = unit.comments.find(qid);
    if (comment != unit.comments.end() && !comment->second.empty()) {
      corpus.push_back({prompt, render(comment->second, truth)});
      continue;
    }
    bool covered = false;
    for (const auto& arg : arguments) {
      if (arg.question_id != qid || arg.stance != truth) continue;
      corpus.push_back({prompt, render(arg.argument_text, truth)});
      covered = true;
    }
    if (!covered) uncovered.push_back(qid);
  }
  if (!uncovered.empty()) {
    std::string msg = "build_sft_corpus: no matching-stance argument for question ids:";
    for (const auto& id : uncovered) msg += " " + id;
    throw DataError(msg);
  }
  return corpus;
}

SftResult sft_train(Policy& policy, const std::vector<SftExample>& corpus,
                    const SftConfig& config, const SftStepCallback& on_step) {
  if (config.steps < 0) throw ConfigError("sft_train: negative step count");
  SftResult result;
  if (config.steps == 0) return result;
  if (corpus.empty()) throw ConfigError("sft_train: empty corpus");
  if (config.batch_size < 1) throw ConfigError("sft_train: batch_size must be positive");

  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(Rng::derive(config.seed, "sft_order"));
  rng.shuffle(order);

  std::size_t cursor = 0;
  for (int step = 1; step <= config.steps; ++step) {
    std::vector<SftExample> batch;
    for (int b = 0; b < config.batch_size; ++b) {
      batch.push_back(corpus[order[cursor]]);
      if (++cursor == order.size()) {
        cursor = 0;
        rng.shuffle(order);
      }
    }
    const double lr = cosine_lr(step, config.steps, config.warmup_steps, config.lr);
    const double loss = policy.sft_update(batch, lr);
    if (!std::isfinite(loss)) {
      throw TrainingError("sft_train: non-finite loss at step " + std::to_string(step));
    }
    result.losses.push_back(loss);
    result.final_loss = loss;
    if (on_step) on_step(step, loss, lr);
  }
  return result;
}

}  // namespace stancelab
