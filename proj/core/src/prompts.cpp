#include "stancelab/prompts.hpp"

#include "stancelab/errors.hpp"

namespace stancelab {

namespace {

std::string nationality(Country country) {
  switch (country) {
    case Country::CH: return "Swiss";
    case Country::DE: return "German";
    case Country::US: return "US";
  }
  throw ConfigError("nationality: bad country");
}

std::string argument_country(SurveyKind survey) {
  switch (survey) {
    case SurveyKind::Smartvote: return "Switzerland";
    case SurveyKind::Wom: return "Germany";
    case SurveyKind::Anes: return "USA";
  }
  throw ConfigError("argument_country: bad survey");
}

std::string speaker_role(SurveyKind survey) {
  // Party-political surveys speak as a politician, citizen surveys as a voter.
  return survey == SurveyKind::Anes ? "voter" : "politician";
}

}  // namespace

std::string system_prompt(Country country, const LabelSpace& space) {
  const bool ternary = space.contains(Stance::Neutral);
  std::string options = "(\"A\" for \"Yes\", \"B\" for \"No\"";
  if (ternary) options += ", \"C\" for \"Neutral\"";
  options += ")";
  std::string legend = "A) Yes, B) No";
  if (ternary) legend += ", C) Neutral";

  std::string out;
  out += "You are a digital twin of a " + nationality(country) + " voter.\n";
  out += "You are asked a policy issue or question.\n";
  out += "You must reason and then answer the question as if you were the voter.\n";
  out += "You reason and answer in English.\n";
  out += "Your final answer must be one of the answer options " + options + ".\n";
  out += "You must respond in the following format:\n";
  out += "<reasoning>\n";
  out += "Your reasoning goes here.\n";
  out += "</reasoning>\n";
  out += "<answer>\n";
  out += "Final answer, one of " + legend + ".\n";
  out += "</answer>";
  return out;
}

PromptSpec build_prompt(Country country, const Question& question,
                        const LabelSpace& space) {
  PromptSpec prompt;
  prompt.system = system_prompt(country, space);
  prompt.question_id = question.id;
  prompt.question = question.text;
  prompt.space = space;
  return prompt;
}

std::string PromptSpec::render_text() const {
  return system + "\n\nQuestion: " + question + "\n";
}

std::string argument_side_name(ArgumentSide side) {
  switch (side) {
    case ArgumentSide::For: return "for";
    case ArgumentSide::Against: return "against";
    case ArgumentSide::Neutral: return "neutral";
  }
  throw ConfigError("argument_side_name: bad enum");
}

ArgumentSide argument_side_from_name(const std::string& name) {
  if (name == "for") return ArgumentSide::For;
  if (name == "against") return ArgumentSide::Against;
  if (name == "neutral") return ArgumentSide::Neutral;
  throw DataError("unknown argument side '" + name + "'");
}

std::string argument_bias_name(ArgumentBias bias) {
  switch (bias) {
    case ArgumentBias::Default: return "default";
    case ArgumentBias::Progressive: return "progressive";
    case ArgumentBias::Conservative: return "conservative";
  }
  throw ConfigError("argument_bias_name: bad enum");
}

ArgumentBias argument_bias_from_name(const std::string& name) {
  if (name == "default") return ArgumentBias::Default;
  if (name == "progressive") return ArgumentBias::Progressive;
  if (name == "conservative") return ArgumentBias::Conservative;
  throw DataError("unknown argument bias '" + name + "'");
}

std::string argument_prompt(SurveyKind survey, ArgumentSide side, ArgumentBias bias,
                            const std::string& issue) {
  std::string out = "You are a " + speaker_role(survey) + " in " +
                    argument_country(survey) + ". You reply in English only.\n";
  out += "We present you with a political issue or question, and you provide us with ";

  if (bias == ArgumentBias::Default) {
    if (side == ArgumentSide::Neutral) {
      // Extension for ternary label spaces; the stock template only covers
      // the two committed sides.
      out += "three to five diverse yet concise reasons to remain neutral or "
             "undecided on this issue or question.\n";
    } else {
      out += "three to five diverse yet concise arguments " +
             argument_side_name(side) + " this issue or question.\n";
    }
  } else {
    const std::string lean = argument_bias_name(bias);
    if (side == ArgumentSide::Neutral) {
      out += "a " + lean + " reason to remain neutral or undecided on this issue "
             "or question.\n";
    } else {
      out += "a " + lean + " argument " + argument_side_name(side) +
             " this issue or question.\n";
    }
  }
  out += issue;
  return out;
}

Stance stance_for_side(ArgumentSide side) {
  switch (side) {
    case ArgumentSide::For: return Stance::Yes;
    case ArgumentSide::Against: return Stance::No;
    case ArgumentSide::Neutral: return Stance::Neutral;
  }
  throw ConfigError("stance_for_side: bad enum");
}

ArgumentSide side_for_stance(Stance stance) {
  switch (stance) {
    case Stance::Yes: return ArgumentSide::For;
    case Stance::No: return ArgumentSide::Against;
    case Stance::Neutral: return ArgumentSide::Neutral;
  }
  throw ConfigError("side_for_stance: bad enum");
}

}  // namespace stancelab
