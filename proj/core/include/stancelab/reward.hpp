#pragma once

#include <functional>
#include <string>

#include "stancelab/schema.hpp"
#include "stancelab/stance.hpp"

namespace stancelab {

// Counts tokens of a reasoning body. Toy backends count whitespace-delimited
// words; language-model backends plug in their own tokenizer.
using TokenCounter = std::function<int(const std::string&)>;

int whitespace_token_count(const std::string& text);

// Composite reward R = w_format * R_format + w_length * R_length
//                    + w_correct * R_correct with
//   R_format  = number of schema tags in place (0..4)
//   R_length  = -|L - length_target|, L = token length of the reasoning body
//   R_correct = 1 iff the resolved stance equals the ground truth.
struct RewardWeights {
  double format = 0.25;
  double length = 0.01;
  double correct = 1.0;
};

struct RewardBreakdown {
  int format_tags = 0;
  int reasoning_tokens = 0;
  double format = 0.0;
  double length = 0.0;
  double correct = 0.0;
  double total = 0.0;
};

int format_reward(const ParseResult& parsed);

// L counts the reasoning body only; a missing body counts zero tokens.
double length_reward(const ParseResult& parsed, const TokenCounter& counter,
                     int length_target);

double correctness_reward(const ParseResult& parsed, Stance truth);

RewardBreakdown total_reward(const std::string& completion_text, Stance truth,
                             const LabelSpace& space, const RewardWeights& weights,
                             const TokenCounter& counter, int length_target);

}  // namespace stancelab
