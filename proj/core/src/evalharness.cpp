#include "stancelab/evalharness.hpp"

#include <algorithm>

#include "stancelab/errors.hpp"
#include "stancelab/prompts.hpp"
#include "stancelab/rng.hpp"
#include "stancelab/schema.hpp"

namespace stancelab {

namespace {

RunScores score_run(const Dataset& dataset, const EvalTask& task,
                    const std::vector<Prediction>& preds, const std::string& unit_id,
                    const std::string& method, int run_index) {
  RunScores s;
  s.unit_id = unit_id;
  s.method = method;
  s.run_index = run_index;
  s.macro_f1 = macro_f1(task.truths, preds, dataset.label_space);
  s.accuracy = accuracy(task.truths, preds);
  s.per_class_recall = per_class_recall(task.truths, preds, dataset.label_space);
  s.neutral_base_rate = task.neutral_base_rate;
  return s;
}

}  // namespace

EvalTask make_eval_task(const Dataset& dataset, const Unit& unit,
                        const std::vector<std::string>& test_ids) {
  EvalTask task;
  for (const auto& qid : test_ids) {
    const Question* q = dataset.find_question(qid);
    if (q == nullptr) throw DataError("eval: unknown test question '" + qid + "'");
    auto it = unit.responses.find(qid);
    if (it == unit.responses.end()) continue;
    task.questions.push_back(*q);
    task.truths.push_back(it->second);
  }
  if (task.truths.empty()) {
    throw DataError("eval: unit '" + unit.unit_id + "' answered no test questions");
  }
  int neutral = 0;
  for (Stance s : task.truths) {
    if (s == Stance::Neutral) ++neutral;
  }
  task.neutral_base_rate = static_cast<double>(neutral) / task.truths.size();
  return task;
}

std::vector<RunScores> evaluate_unit(Policy& policy, const Dataset& dataset,
                                     const Unit& unit,
                                     const std::vector<std::string>& test_ids,
                                     const std::string& method, int n_runs,
                                     double temperature, std::uint64_t seed) {
  if (n_runs < 1) throw ConfigError("evaluate_unit: n_runs must be positive");
  const EvalTask task = make_eval_task(dataset, unit, test_ids);
  std::vector<RunScores> out;
  for (int run = 1; run <= n_runs; ++run) {
    const std::uint64_t run_seed =
        Rng::derive(seed, "eval:" + unit.unit_id + ":run" + std::to_string(run));
    std::vector<Prediction> preds;
    preds.reserve(task.questions.size());
    for (const auto& q : task.questions) {
      const PromptSpec prompt = build_prompt(unit.country, q, dataset.label_space);
      const auto completions =
          policy.sample(prompt, 1, temperature, Rng::derive(run_seed, q.id));
      preds.push_back(parse(completions.front().text, dataset.label_space).stance);
    }
    out.push_back(score_run(dataset, task, preds, unit.unit_id, method, run));
  }
  return out;
}

Stance majority_stance(const Unit& unit, const std::vector<std::string>& train_ids) {
  std::map<Stance, int> counts;
  for (const auto& qid : train_ids) {
    auto it = unit.responses.find(qid);
    if (it != unit.responses.end()) ++counts[it->second];
  }
  if (counts.empty()) {
    throw DataError("majority_stance: unit '" + unit.unit_id +
                    "' answered no train questions");
  }
  Stance best = Stance::Yes;
  int best_count = -1;
  for (Stance s : {Stance::Yes, Stance::No, Stance::Neutral}) {
    auto it = counts.find(s);
    if (it != counts.end() && it->second > best_count) {
      best = s;
      best_count = it->second;
    }
  }
  return best;
}

std::vector<RunScores> evaluate_majority(const Dataset& dataset, const Unit& unit,
                                         const std::vector<std::string>& train_ids,
                                         const std::vector<std::string>& test_ids,
                                         int n_runs) {
  const EvalTask task = make_eval_task(dataset, unit, test_ids);
  const Stance modal = majority_stance(unit, train_ids);
  const std::vector<Prediction> preds(task.truths.size(), Prediction(modal));
  std::vector<RunScores> out;
  for (int run = 1; run <= n_runs; ++run) {
    out.push_back(score_run(dataset, task, preds, unit.unit_id, "majority", run));
  }
  return out;
}

std::vector<RunScores> evaluate_random(const Dataset& dataset, const Unit& unit,
                                       const std::vector<std::string>& test_ids,
                                       int n_runs, std::uint64_t seed) {
  const EvalTask task = make_eval_task(dataset, unit, test_ids);
  const auto& stances = dataset.label_space.stances();
  std::vector<RunScores> out;
  for (int run = 1; run <= n_runs; ++run) {
    Rng rng(Rng::derive(seed, "random:" + unit.unit_id + ":run" + std::to_string(run)));
    std::vector<Prediction> preds;
    preds.reserve(task.truths.size());
    for (std::size_t i = 0; i < task.truths.size(); ++i) {
      preds.push_back(stances[rng.next_below(stances.size())]);
    }
    out.push_back(score_run(dataset, task, preds, unit.unit_id, "random", run));
  }
  return out;
}

IclPrompt icl_build_prompt(const Dataset& dataset, const Unit& unit,
                           const std::vector<std::string>& train_ids,
                           const Question& test_question, int context_limit,
                           std::uint64_t seed) {
  std::vector<const Question*> pool;
  for (const auto& qid : train_ids) {
    const Question* q = dataset.find_question(qid);
    if (q == nullptr) throw DataError("icl: unknown train question '" + qid + "'");
    if (unit.responses.find(qid) == unit.responses.end()) continue;
    if (!test_question.topic.empty() && q->topic != test_question.topic) continue;
    pool.push_back(q);
  }

  std::vector<std::size_t> keep(pool.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
  if (context_limit > 0 && pool.size() > static_cast<std::size_t>(context_limit)) {
    Rng rng(Rng::derive(seed, "icl:" + unit.unit_id + ":" + test_question.id));
    rng.shuffle(keep);
    keep.resize(static_cast<std::size_t>(context_limit));
    std::sort(keep.begin(), keep.end());  // demonstrations keep train order
  }

  IclPrompt out;
  out.text = system_prompt(unit.country, dataset.label_space) + "\n\n";
  for (std::size_t i : keep) {
    const Question& q = *pool[i];
    const Stance truth = unit.responses.at(q.id);
    out.text += "Question: " + q.text + "\nAnswer: " + std::string(1, stance_letter(truth)) +
                ") " + stance_label(truth) + "\n\n";
    out.demo_question_ids.push_back(q.id);
  }
  out.text += "Question: " + test_question.text + "\n";
  return out;
}

std::vector<RunScores> evaluate_icl(Policy& policy, const Dataset& dataset,
                                    const Unit& unit,
                                    const std::vector<std::string>& train_ids,
                                    const std::vector<std::string>& test_ids,
                                    int context_limit, int n_runs, double temperature,
                                    std::uint64_t seed) {
  if (n_runs < 1) throw ConfigError("evaluate_icl: n_runs must be positive");
  const EvalTask task = make_eval_task(dataset, unit, test_ids);
  std::vector<RunScores> out;
  for (int run = 1; run <= n_runs; ++run) {
    const std::uint64_t run_seed =
        Rng::derive(seed, "icl_eval:" + unit.unit_id + ":run" + std::to_string(run));
    std::vector<Prediction> preds;
    preds.reserve(task.questions.size());
    for (const auto& q : task.questions) {
      const IclPrompt icl =
          icl_build_prompt(dataset, unit, train_ids, q, context_limit, seed);
      PromptSpec prompt;
      prompt.system = system_prompt(unit.country, dataset.label_space);
      prompt.question_id = q.id;
      // Demonstrations ride along in the question text so any backend,
      // including the featurized toy, conditions on them.
      prompt.question = icl.text;
      prompt.space = dataset.label_space;
      const auto completions =
          policy.sample(prompt, 1, temperature, Rng::derive(run_seed, q.id));
      preds.push_back(parse(completions.front().text, dataset.label_space).stance);
    }
    out.push_back(score_run(dataset, task, preds, unit.unit_id, "ICL", run));
  }
  return out;
}

std::map<std::string, Stance> greedy_predictions(Policy& policy, const Dataset& dataset,
                                                 const Unit& unit,
                                                 const std::vector<std::string>& test_ids) {
  const EvalTask task = make_eval_task(dataset, unit, test_ids);
  std::map<std::string, Stance> out;
  for (const auto& q : task.questions) {
    const PromptSpec prompt = build_prompt(unit.country, q, dataset.label_space);
    out[q.id] = greedy_stance(policy, prompt);
  }
  return out;
}

}  // namespace stancelab
