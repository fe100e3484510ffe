#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "stancelab/policy.hpp"
#include "stancelab/prompts.hpp"
#include "stancelab/survey.hpp"

namespace stancelab {

enum class ArgumentOrigin { Generated, Stub };

std::string argument_origin_name(ArgumentOrigin o);
ArgumentOrigin argument_origin_from_name(const std::string& name);

struct ArgumentRecord {
  std::string question_id;
  Stance stance = Stance::Yes;
  std::string argument_text;
  ArgumentBias bias_tag = ArgumentBias::Default;
  ArgumentOrigin origin = ArgumentOrigin::Stub;
};

// JSON-lines persistence, one record per line.
void save_arguments(const std::vector<ArgumentRecord>& records, const std::string& path);
std::vector<ArgumentRecord> load_arguments(const std::string& path);

// Minimal completion client for out-of-process argument generation.
struct TextClient {
  virtual ~TextClient() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

// POSTs {"model", "prompt"} as JSON and expects {"text": "..."} back.
class HttpTextClient : public TextClient {
 public:
  HttpTextClient(std::string host, int port, std::string path, std::string model,
                 int timeout_seconds = 60);
  ~HttpTextClient() override;
  std::string complete(const std::string& prompt) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// With a client: sends the instantiated argument prompt, retries on failure,
// and returns an empty list (question uncovered) once retries are exhausted.
// Without one the deterministic stub emits 3 to 5 templated arguments.
std::vector<ArgumentRecord> generate_arguments(const Question& question, SurveyKind survey,
                                               ArgumentSide side, ArgumentBias bias,
                                               TextClient* client, std::uint64_t seed,
                                               int retries = 2);

// Generates one side per stance in `space` for every question. Client calls
// run on up to `workers` threads; output order follows the question list.
std::vector<ArgumentRecord> generate_argument_corpus(
    const std::vector<Question>& questions, SurveyKind survey, const LabelSpace& space,
    ArgumentBias bias, TextClient* client, std::uint64_t seed, int workers = 4);

// One example per (train question, matching-stance argument). A unit comment
// on the question takes precedence as the reasoning text. Questions whose
// ground-truth stance has no coverage are collected into a single DataError.
std::vector<SftExample> build_sft_corpus(const Dataset& dataset, const Unit& unit,
                                         const std::vector<std::string>& train_ids,
                                         const std::vector<ArgumentRecord>& arguments);

struct SftConfig {
  int steps = 800;
  int batch_size = 8;
  double lr = 5e-5;
  int warmup_steps = 80;
  std::uint64_t seed = 0;
};

struct SftResult {
  std::vector<double> losses;  // one entry per step
  double final_loss = 0.0;
};

using SftStepCallback = std::function<void(int step, double loss, double lr)>;

SftResult sft_train(Policy& policy, const std::vector<SftExample>& corpus,
                    const SftConfig& config, const SftStepCallback& on_step = {});

}  // namespace stancelab
