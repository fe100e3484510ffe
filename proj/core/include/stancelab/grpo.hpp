#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stancelab/policy.hpp"
#include "stancelab/reward.hpp"
#include "stancelab/survey.hpp"

namespace stancelab {

// Group-relative advantages: standardize rewards within the group. When the
// group is (near-)degenerate the whole group gets zero advantage rather than
// a blown-up one.
std::vector<double> compute_advantages(const std::vector<double>& rewards,
                                       double epsilon = 1e-4);

// Cosine schedule with linear warmup; `step` is 1-based.
double cosine_lr(int step, int total_steps, int warmup_steps, double peak_lr);

struct GrpoConfig {
  int steps = 800;
  int batch_size = 8;       // prompts per step
  int group_size = 8;       // completions per prompt
  double lr = 5e-6;
  int warmup_steps = 80;
  double temperature = 1.0;
  double clip_range = 0.2;
  double kl_coefficient = 0.0;
  double max_grad_norm = 1.0;
  int length_target = 100;
  RewardWeights reward_weights;
  std::uint64_t seed = 0;
  int checkpoint_every = 0;  // 0 disables periodic checkpoints
};

struct TrainStepLog {
  int step = 0;
  double mean_reward = 0.0;
  double mean_abs_advantage = 0.0;
  double loss = 0.0;
  double lr = 0.0;
};

struct GrpoResult {
  std::vector<TrainStepLog> log;
  double final_mean_reward = 0.0;
};

// Called after each step; also receives periodic checkpoint text when
// checkpoint_every is set (empty otherwise).
using StepCallback =
    std::function<void(const TrainStepLog&, const std::string& checkpoint)>;

// Trains `policy` on the unit's answered questions among `questions`.
// Truth for each prompt comes from unit.responses. A non-finite loss aborts
// with TrainingError carrying the last completed step in its message.
GrpoResult grpo_train(Policy& policy, const std::vector<Question>& questions,
                      const Unit& unit, Country country, const LabelSpace& space,
                      const GrpoConfig& config, const StepCallback& on_step = {});

}  // namespace stancelab
