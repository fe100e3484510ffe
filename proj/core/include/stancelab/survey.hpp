#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stancelab/stance.hpp"

namespace stancelab {

enum class SurveyKind { Smartvote, Wom, Anes };
enum class UnitKind { Candidate, Party, Respondent };
enum class Country { CH, DE, US };
enum class Group { Left, Center, Right };

std::string survey_name(SurveyKind s);
SurveyKind survey_from_name(const std::string& name);
std::string country_name(Country c);
std::string group_name(Group g);
std::string unit_kind_name(UnitKind k);

// Ideological group lookup keyed on (country, party or self-placement).
// Unknown keys are a data error, not a silent default.
Group assign_group(Country country, const std::string& party_or_ideology);

struct Question {
  std::string id;
  std::string text;
  std::string topic;  // empty for surveys without topical structure
  std::vector<std::string> raw_options;
  // Per-scheme stance for each 1-based raw option index.
  std::map<std::string, std::vector<Stance>> scheme_maps;
};

struct Unit {
  std::string unit_id;
  UnitKind kind = UnitKind::Respondent;
  Country country = Country::CH;
  std::string party_or_ideology;
  Group group = Group::Center;  // derived from assign_group at load time
  std::map<std::string, Stance> responses;       // canonical files
  std::map<std::string, int> raw_responses;      // raw files, 1-based indices
  std::map<std::string, std::string> comments;   // optional explanatory text
};

struct Dataset {
  SurveyKind survey = SurveyKind::Smartvote;
  LabelSpace label_space = LabelSpace::binary();
  std::string recoding_scheme;  // "none" for raw files
  std::vector<Question> questions;
  std::vector<Unit> units;

  const Question* find_question(const std::string& id) const;
  const Unit* find_unit(const std::string& id) const;
};

// Load, validate and save the canonical JSON representation. Validation
// covers id uniqueness, response references, stance admissibility and the
// survey-specific shape rules; any violation raises DataError naming the
// offending record.
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset parse_dataset_json(const std::string& json_text);
std::string dataset_to_json(const Dataset& dataset);

// Recoding. Raw answers stay available in the output for provenance.
Dataset recode_anes(const Dataset& raw, const std::string& scheme);
Dataset collapse_likert(const Dataset& raw);

// Binary surveys only: flip every Yes/No answer.
Dataset invert_answers(const Dataset& dataset);

struct Split {
  std::string strategy;  // "topic_stratified" | "random" | "fixed_external"
  std::uint64_t seed = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

// One uniformly drawn test question per topic, remainder trains.
Split split_topic_stratified(const Dataset& dataset, std::uint64_t seed);
// n_test questions drawn without replacement.
Split split_random(const Dataset& dataset, std::uint64_t seed, std::size_t n_test);
// Externally fixed test set (held-out questionnaire).
Split split_fixed_external(const Dataset& dataset,
                           const std::vector<std::string>& test_ids);

Split load_split(const std::string& path);
void save_split(const Split& split, const std::string& path);
void validate_split(const Dataset& dataset, const Split& split);

}  // namespace stancelab
