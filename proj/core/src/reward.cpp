#include "stancelab/reward.hpp"

#include <cctype>
#include <cmath>

#include "stancelab/errors.hpp"

namespace stancelab {

int whitespace_token_count(const std::string& text) {
  int n = 0;
  bool in_token = false;
  for (unsigned char c : text) {
    const bool space = std::isspace(c) != 0;
    if (!space && !in_token) ++n;
    in_token = !space;
  }
  return n;
}

int format_reward(const ParseResult& parsed) { return parsed.tags_found; }

double length_reward(const ParseResult& parsed, const TokenCounter& counter,
                     int length_target) {
  if (length_target < 0) throw ConfigError("length_target must be non-negative");
  const int n = parsed.reasoning_body ? counter(*parsed.reasoning_body) : 0;
  return -std::abs(n - length_target);
}

double correctness_reward(const ParseResult& parsed, Stance truth) {
  return parsed.stance && *parsed.stance == truth ? 1.0 : 0.0;
}

RewardBreakdown total_reward(const std::string& completion_text, Stance truth,
                             const LabelSpace& space, const RewardWeights& weights,
                             const TokenCounter& counter, int length_target) {
  const ParseResult parsed = parse(completion_text, space);
  RewardBreakdown out;
  out.format_tags = format_reward(parsed);
  out.reasoning_tokens = parsed.reasoning_body ? counter(*parsed.reasoning_body) : 0;
  out.format = static_cast<double>(out.format_tags);
  out.length = length_reward(parsed, counter, length_target);
  out.correct = correctness_reward(parsed, truth);
  out.total = weights.format * out.format + weights.length * out.length +
              weights.correct * out.correct;
  return out;
}

}  // namespace stancelab
