#pragma once

#include <string>

#include "stancelab/policy.hpp"
#include "stancelab/stance.hpp"
#include "stancelab/survey.hpp"

namespace stancelab {

// Digital-twin system prompt. The answer legend is restricted to the label
// space: binary questionnaires drop the "C" option entirely.
std::string system_prompt(Country country, const LabelSpace& space);

PromptSpec build_prompt(Country country, const Question& question,
                        const LabelSpace& space);

enum class ArgumentSide { For, Against, Neutral };
enum class ArgumentBias { Default, Progressive, Conservative };

std::string argument_side_name(ArgumentSide side);
ArgumentSide argument_side_from_name(const std::string& name);
std::string argument_bias_name(ArgumentBias bias);
ArgumentBias argument_bias_from_name(const std::string& name);

// Prompt sent to an argument generator for one issue. The default template
// requests three to five diverse arguments for one side; the biased variants
// request a single progressive or conservative argument. The speaker role is
// "politician" for party-political surveys and "voter" for citizen surveys.
std::string argument_prompt(SurveyKind survey, ArgumentSide side, ArgumentBias bias,
                            const std::string& issue);

Stance stance_for_side(ArgumentSide side);
ArgumentSide side_for_stance(Stance stance);

}  // namespace stancelab
