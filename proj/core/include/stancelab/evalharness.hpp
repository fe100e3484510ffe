#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stancelab/metrics.hpp"
#include "stancelab/policy.hpp"
#include "stancelab/survey.hpp"

namespace stancelab {

struct RunScores {
  std::string unit_id;
  std::string method;
  int run_index = 1;  // 1-based
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::map<Stance, double> per_class_recall;  // classes without truth instances omitted
  double neutral_base_rate = 0.0;
};

// Test questions the unit actually answered, with ground truth, in split order.
struct EvalTask {
  std::vector<Question> questions;
  std::vector<Stance> truths;
  double neutral_base_rate = 0.0;
};

EvalTask make_eval_task(const Dataset& dataset, const Unit& unit,
                        const std::vector<std::string>& test_ids);

// One stochastic sample per question per run; scores are per run.
std::vector<RunScores> evaluate_unit(Policy& policy, const Dataset& dataset,
                                     const Unit& unit,
                                     const std::vector<std::string>& test_ids,
                                     const std::string& method, int n_runs = 8,
                                     double temperature = 1.0, std::uint64_t seed = 0);

// Modal stance over the unit's answered train questions; ties resolved by the
// canonical order Yes, No, Neutral.
Stance majority_stance(const Unit& unit, const std::vector<std::string>& train_ids);

// Constant-prediction baseline, reported as n_runs identical rows so that
// downstream aggregation treats every method uniformly.
std::vector<RunScores> evaluate_majority(const Dataset& dataset, const Unit& unit,
                                         const std::vector<std::string>& train_ids,
                                         const std::vector<std::string>& test_ids,
                                         int n_runs = 8);

// Uniform-random predictions, fresh draw per question per run.
std::vector<RunScores> evaluate_random(const Dataset& dataset, const Unit& unit,
                                       const std::vector<std::string>& test_ids,
                                       int n_runs = 8, std::uint64_t seed = 0);

struct IclPrompt {
  std::string text;
  std::vector<std::string> demo_question_ids;  // empty means zero demonstrations
};

// Demonstrations are the unit's answered train questions sharing the test
// question's topic, in train order; topicless datasets fall back to the whole
// train pool. When context_limit > 0 caps the count, a seeded uniform subset
// is taken with the original order preserved.
IclPrompt icl_build_prompt(const Dataset& dataset, const Unit& unit,
                           const std::vector<std::string>& train_ids,
                           const Question& test_question, int context_limit,
                           std::uint64_t seed);

std::vector<RunScores> evaluate_icl(Policy& policy, const Dataset& dataset,
                                    const Unit& unit,
                                    const std::vector<std::string>& train_ids,
                                    const std::vector<std::string>& test_ids,
                                    int context_limit, int n_runs = 8,
                                    double temperature = 1.0, std::uint64_t seed = 0);

// Greedy predictions for the unit's answered test questions, keyed by id.
std::map<std::string, Stance> greedy_predictions(Policy& policy, const Dataset& dataset,
                                                 const Unit& unit,
                                                 const std::vector<std::string>& test_ids);

}  // namespace stancelab
