#pragma once

#include <optional>
#include <string>

#include "stancelab/stance.hpp"

namespace stancelab {

// Structured output contract for agent completions:
//   <reasoning>[justification]</reasoning><answer>X) Label</answer>
//
// parse() is total: any byte string yields a ParseResult, never an exception.
struct ParseResult {
  // Number of schema tags (of four) that appear exactly once and in schema
  // order relative to the previously counted tags. Duplicated tags count 0.
  int tags_found = 0;
  // Present only when the enclosing tag pair was counted.
  std::optional<std::string> reasoning_body;
  std::optional<std::string> answer_body;
  // Resolved stance, if the answer body names one inside the label space.
  std::optional<Stance> stance;
  bool well_formed = false;  // all four tags counted
};

std::string render(const std::string& reasoning, Stance stance);

ParseResult parse(const std::string& text, const LabelSpace& space);

// Stance extraction from an answer body. A leading letter code ("A", "b)",
// "C: ...") takes precedence; otherwise the first standalone label word
// ("yes" / "no" / "neutral") wins. A match outside the label space is
// unresolved, not an error.
std::optional<Stance> extract_stance(const std::string& answer_body,
                                     const LabelSpace& space);

}  // namespace stancelab
