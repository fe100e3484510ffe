#include "stancelab/metrics.hpp"

#include "stancelab/errors.hpp"

namespace stancelab {

namespace {

void check_sizes(std::size_t nt, std::size_t np) {
  if (nt != np) throw MetricError("metrics: truths and predictions differ in length");
  if (nt == 0) throw MetricError("metrics: empty sample");
}

struct ClassCounts {
  long tp = 0, fp = 0, fn = 0;
};

ClassCounts count_class(const std::vector<Stance>& truths,
                        const std::vector<Prediction>& preds, Stance c) {
  ClassCounts k;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const bool truth_c = truths[i] == c;
    const bool pred_c = preds[i].has_value() && *preds[i] == c;
    if (truth_c && pred_c) ++k.tp;
    if (!truth_c && pred_c) ++k.fp;
    if (truth_c && !pred_c) ++k.fn;
  }
  return k;
}

double f1_from_counts(const ClassCounts& k) {
  const double p = k.tp + k.fp > 0 ? static_cast<double>(k.tp) / (k.tp + k.fp) : 0.0;
  const double r = k.tp + k.fn > 0 ? static_cast<double>(k.tp) / (k.tp + k.fn) : 0.0;
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

}  // namespace

double macro_f1(const std::vector<Stance>& truths,
                const std::vector<Prediction>& preds, const LabelSpace& space) {
  check_sizes(truths.size(), preds.size());
  double sum = 0.0;
  for (Stance c : space.stances()) sum += f1_from_counts(count_class(truths, preds, c));
  return sum / static_cast<double>(space.size());
}

double accuracy(const std::vector<Stance>& truths,
                const std::vector<Prediction>& preds) {
  check_sizes(truths.size(), preds.size());
  long hits = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (preds[i].has_value() && *preds[i] == truths[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truths.size());
}

std::map<Stance, double> per_class_recall(const std::vector<Stance>& truths,
                                          const std::vector<Prediction>& preds,
                                          const LabelSpace& space) {
  check_sizes(truths.size(), preds.size());
  std::map<Stance, double> out;
  for (Stance c : space.stances()) {
    const ClassCounts k = count_class(truths, preds, c);
    if (k.tp + k.fn > 0) out[c] = static_cast<double>(k.tp) / (k.tp + k.fn);
  }
  return out;
}

ConfusionMatrix confusion_matrix(const std::vector<Stance>& truths,
                                 const std::vector<Prediction>& preds,
                                 const LabelSpace& space) {
  check_sizes(truths.size(), preds.size());
  ConfusionMatrix m;
  m.labels = space.stances();
  const std::size_t n = space.size();
  m.counts.assign(n, std::vector<long>(n + 1, 0));
  auto index_of = [&](Stance s) {
    for (std::size_t i = 0; i < n; ++i) {
      if (m.labels[i] == s) return i;
    }
    throw MetricError("confusion_matrix: stance outside label space");
  };
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const std::size_t row = index_of(truths[i]);
    const std::size_t col = preds[i].has_value() ? index_of(*preds[i]) : n;
    ++m.counts[row][col];
  }
  return m;
}

RescoredPair drop_neutral_rescore(const std::vector<Stance>& truths,
                                  const std::vector<Prediction>& preds) {
  check_sizes(truths.size(), preds.size());
  std::vector<Stance> kept_truths;
  std::vector<Prediction> kept_preds;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] == Stance::Neutral) continue;
    kept_truths.push_back(truths[i]);
    // A Neutral prediction is outside the rescored space: treat as unresolved.
    if (preds[i].has_value() && *preds[i] == Stance::Neutral) {
      kept_preds.push_back(std::nullopt);
    } else {
      kept_preds.push_back(preds[i]);
    }
  }
  if (kept_truths.empty()) {
    throw MetricError("drop_neutral_rescore: every ground-truth item is Neutral");
  }
  RescoredPair out;
  const LabelSpace space = LabelSpace::binary();
  out.macro_f1 = macro_f1(kept_truths, kept_preds, space);
  out.accuracy = accuracy(kept_truths, kept_preds);
  out.kept = kept_truths.size();
  return out;
}

}  // namespace stancelab
