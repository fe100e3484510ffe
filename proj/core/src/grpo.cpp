#include "stancelab/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stancelab/errors.hpp"
#include "stancelab/prompts.hpp"
#include "stancelab/rng.hpp"
#include "stancelab/stats.hpp"

namespace stancelab {

std::vector<double> compute_advantages(const std::vector<double>& rewards,
                                       double epsilon) {
  if (rewards.empty()) throw ConfigError("compute_advantages: empty group");
  for (double r : rewards) {
    if (!std::isfinite(r)) throw MetricError("compute_advantages: non-finite reward");
  }
  const double mu = mean(rewards);
  const double sigma = population_stddev(rewards);
  std::vector<double> adv(rewards.size(), 0.0);
  if (sigma < epsilon) return adv;  // degenerate group: no learning signal
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    adv[i] = (rewards[i] - mu) / sigma;
  }
  return adv;
}

double cosine_lr(int step, int total_steps, int warmup_steps, double peak_lr) {
  if (step < 1 || total_steps < 1) throw ConfigError("cosine_lr: steps must be positive");
  if (warmup_steps < 0 || warmup_steps > total_steps) {
    throw ConfigError("cosine_lr: warmup outside schedule");
  }
  if (step <= warmup_steps) {
    return peak_lr * static_cast<double>(step) / static_cast<double>(warmup_steps);
  }
  if (total_steps == warmup_steps) return peak_lr;
  const double progress = static_cast<double>(step - warmup_steps) /
                          static_cast<double>(total_steps - warmup_steps);
  return peak_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

GrpoResult grpo_train(Policy& policy, const std::vector<Question>& questions,
                      const Unit& unit, Country country, const LabelSpace& space,
                      const GrpoConfig& config, const StepCallback& on_step) {
  if (config.steps < 0) throw ConfigError("grpo_train: negative step count");
  if (config.steps == 0) return {};
  if (config.batch_size < 1) throw ConfigError("grpo_train: batch_size must be positive");
  if (config.group_size < 2) {
    throw ConfigError("grpo_train: group_size must be at least 2");
  }

  struct Item {
    PromptSpec prompt;
    Stance truth;
  };
  std::vector<Item> pool;
  for (const auto& q : questions) {
    auto it = unit.responses.find(q.id);
    if (it == unit.responses.end()) continue;
    pool.push_back({build_prompt(country, q, space), it->second});
  }
  if (pool.empty()) throw ConfigError("grpo_train: unit answered none of the questions");

  const TokenCounter counter = [&policy](const std::string& t) {
    return policy.count_tokens(t);
  };

  policy.snapshot_reference();
  Rng rng(Rng::derive(config.seed, "grpo:" + unit.unit_id));
  std::string last_good = policy.checkpoint_json();

  GrpoResult result;
  for (int step = 1; step <= config.steps; ++step) {
    std::vector<RlExample> batch;
    double reward_sum = 0.0;
    double abs_adv_sum = 0.0;
    int n_samples = 0;

    for (int b = 0; b < config.batch_size; ++b) {
      const Item& item = pool[rng.next_below(pool.size())];
      const std::uint64_t sample_seed = rng.next_u64();
      const auto group = policy.sample(item.prompt, config.group_size,
                                       config.temperature, sample_seed);
      std::vector<double> rewards(group.size());
      for (std::size_t g = 0; g < group.size(); ++g) {
        rewards[g] = total_reward(group[g].text, item.truth, space,
                                  config.reward_weights, counter,
                                  config.length_target)
                         .total;
        reward_sum += rewards[g];
      }
      const auto advantages = compute_advantages(rewards);
      for (std::size_t g = 0; g < group.size(); ++g) {
        abs_adv_sum += std::abs(advantages[g]);
        batch.push_back({item.prompt, group[g], advantages[g]});
      }
      n_samples += static_cast<int>(group.size());
    }

    RlUpdateConfig rl;
    rl.lr = cosine_lr(step, config.steps, config.warmup_steps, config.lr);
    rl.clip_range = config.clip_range;
    rl.kl_coefficient = config.kl_coefficient;
    rl.temperature = config.temperature;
    rl.max_grad_norm = config.max_grad_norm;

    RlMetrics metrics;
    try {
      metrics = policy.rl_update(batch, rl);
    } catch (const TrainingError&) {
      policy.load_checkpoint_json(last_good);
      throw TrainingError("grpo_train: non-finite loss at step " + std::to_string(step) +
                          "; restored checkpoint from step " + std::to_string(step - 1));
    }

    TrainStepLog log;
    log.step = step;
    log.mean_reward = reward_sum / n_samples;
    log.mean_abs_advantage = abs_adv_sum / n_samples;
    log.loss = metrics.loss;
    log.lr = rl.lr;
    result.log.push_back(log);
    result.final_mean_reward = log.mean_reward;

    std::string checkpoint;
    if (config.checkpoint_every > 0 && step % config.checkpoint_every == 0) {
      checkpoint = policy.checkpoint_json();
    }
    last_good = checkpoint.empty() ? policy.checkpoint_json() : checkpoint;
    if (on_step) on_step(log, checkpoint);
  }
  return result;
}

}  // namespace stancelab
