#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "stancelab/stance.hpp"
#include "stancelab/survey.hpp"

namespace stancelab {

// Prompt handed to a policy backend: fully rendered system text plus the
// question. Toy backends key their parameters on question_id; language-model
// backends consume render_text().
struct PromptSpec {
  std::string system;
  std::string question_id;
  std::string question;
  LabelSpace space = LabelSpace::binary();

  std::string render_text() const;
};

struct Completion {
  std::string text;
  std::vector<std::int64_t> token_ids;
  std::vector<double> token_logprobs;

  double logprob() const;  // sum of per-token log-probabilities
};

struct SftExample {
  PromptSpec prompt;
  std::string target;  // must parse under the reasoning schema
};

struct RlExample {
  PromptSpec prompt;
  Completion completion;
  double advantage = 0.0;
};

struct RlUpdateConfig {
  double lr = 1e-2;
  double clip_range = 0.2;
  double kl_coefficient = 0.0;
  double temperature = 1.0;      // matches the sampling temperature
  double max_grad_norm = 1.0;    // 0 disables clipping
};

struct RlMetrics {
  double loss = 0.0;           // -(clipped surrogate) + kl_coefficient * kl
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
  double kl = 0.0;             // KL(reference || current), exact for toys
};

// Training/inference contract shared by toy backends and out-of-process
// language-model adapters. All entry points are deterministic given their
// seeds. Sampling temperature must be positive; kGreedyTemperature is small
// enough to act as argmax for every practical logit scale.
inline constexpr double kGreedyTemperature = 1e-9;

class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::vector<Completion> sample(const PromptSpec& prompt, int n,
                                         double temperature, std::uint64_t seed) = 0;
  // Sequence log-probability of a completion under the current parameters,
  // or under the frozen reference snapshot.
  virtual double logprob(const PromptSpec& prompt, const Completion& completion,
                         double temperature, bool reference) = 0;
  // One cross-entropy step; returns the pre-step batch loss.
  virtual double sft_update(const std::vector<SftExample>& batch, double lr) = 0;
  // One ascent step on the clipped surrogate, mean over the batch.
  virtual RlMetrics rl_update(const std::vector<RlExample>& batch,
                              const RlUpdateConfig& config) = 0;
  virtual void snapshot_reference() = 0;
  virtual int count_tokens(const std::string& text) const = 0;

  virtual std::string checkpoint_json() const = 0;
  virtual void load_checkpoint_json(const std::string& text) = 0;
};

Stance greedy_stance(Policy& policy, const PromptSpec& prompt);

// Tabular toy: independent stance logits per question id. Converges fast,
// cannot generalize to unseen questions.
class ToyTabularPolicy : public Policy {
 public:
  explicit ToyTabularPolicy(LabelSpace space);
  ~ToyTabularPolicy() override;

  std::vector<Completion> sample(const PromptSpec& prompt, int n, double temperature,
                                 std::uint64_t seed) override;
  double logprob(const PromptSpec& prompt, const Completion& completion,
                 double temperature, bool reference) override;
  double sft_update(const std::vector<SftExample>& batch, double lr) override;
  RlMetrics rl_update(const std::vector<RlExample>& batch,
                      const RlUpdateConfig& config) override;
  void snapshot_reference() override;
  int count_tokens(const std::string& text) const override;
  std::string checkpoint_json() const override;
  void load_checkpoint_json(const std::string& text) override;

  // Parameter access for inspection and finite-difference checks.
  std::vector<double> logits(const std::string& question_id) const;
  void set_logits(const std::string& question_id, const std::vector<double>& logits);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Featurized toy: bag-of-words weights over the question text feed the
// stance logits, so it generalizes to unseen questions.
class ToyFeaturizedPolicy : public Policy {
 public:
  explicit ToyFeaturizedPolicy(LabelSpace space);
  ~ToyFeaturizedPolicy() override;

  std::vector<Completion> sample(const PromptSpec& prompt, int n, double temperature,
                                 std::uint64_t seed) override;
  double logprob(const PromptSpec& prompt, const Completion& completion,
                 double temperature, bool reference) override;
  double sft_update(const std::vector<SftExample>& batch, double lr) override;
  RlMetrics rl_update(const std::vector<RlExample>& batch,
                      const RlUpdateConfig& config) override;
  void snapshot_reference() override;
  int count_tokens(const std::string& text) const override;
  std::string checkpoint_json() const override;
  void load_checkpoint_json(const std::string& text) override;

  std::vector<double> stance_logits(const PromptSpec& prompt) const;
  void set_token_weight(const std::string& token, const std::vector<double>& w);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::unique_ptr<Policy> make_policy(const std::string& backend, const LabelSpace& space);

// Restore a toy policy from checkpoint_json() output.
std::unique_ptr<Policy> policy_from_checkpoint(const std::string& text);

}  // namespace stancelab
