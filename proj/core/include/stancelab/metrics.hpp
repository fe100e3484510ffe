#pragma once

#include <map>
#include <optional>
#include <vector>

#include "stancelab/stance.hpp"

namespace stancelab {

// Predictions may be unresolved (the completion named no stance); an
// unresolved prediction counts as wrong for every class.
using Prediction = std::optional<Stance>;

struct ConfusionMatrix {
  // counts[truth][pred]; the last prediction column is "unresolved".
  std::vector<std::vector<long>> counts;
  std::vector<Stance> labels;
};

// Macro F1 averaged over the full declared label space. A class absent from
// both truths and predictions contributes an F1 of zero, it is not skipped.
double macro_f1(const std::vector<Stance>& truths,
                const std::vector<Prediction>& preds, const LabelSpace& space);

double accuracy(const std::vector<Stance>& truths,
                const std::vector<Prediction>& preds);

// Recall per class; classes with no truth instances are absent from the map.
std::map<Stance, double> per_class_recall(const std::vector<Stance>& truths,
                                          const std::vector<Prediction>& preds,
                                          const LabelSpace& space);

ConfusionMatrix confusion_matrix(const std::vector<Stance>& truths,
                                 const std::vector<Prediction>& preds,
                                 const LabelSpace& space);

struct RescoredPair {
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::size_t kept = 0;
};

// Drops items whose ground truth is Neutral and rescores the remainder over
// the binary {Yes, No} space. Predictions of Neutral on kept items count as
// wrong for every class. Throws MetricError when nothing remains.
RescoredPair drop_neutral_rescore(const std::vector<Stance>& truths,
                                  const std::vector<Prediction>& preds);

}  // namespace stancelab
