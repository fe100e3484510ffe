#include "stancelab/survey.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "json_util.hpp"
#include "stancelab/errors.hpp"
#include "stancelab/rng.hpp"

namespace stancelab {

using detail::Json;

std::string survey_name(SurveyKind s) {
  switch (s) {
    case SurveyKind::Smartvote: return "smartvote";
    case SurveyKind::Wom: return "wom";
    case SurveyKind::Anes: return "anes";
  }
  throw ConfigError("survey_name: bad enum");
}

SurveyKind survey_from_name(const std::string& name) {
  if (name == "smartvote") return SurveyKind::Smartvote;
  if (name == "wom") return SurveyKind::Wom;
  if (name == "anes") return SurveyKind::Anes;
  throw DataError("unknown survey '" + name + "'");
}

std::string country_name(Country c) {
  switch (c) {
    case Country::CH: return "CH";
    case Country::DE: return "DE";
    case Country::US: return "US";
  }
  throw ConfigError("country_name: bad enum");
}

namespace {

Country country_from_name(const std::string& name) {
  if (name == "CH") return Country::CH;
  if (name == "DE") return Country::DE;
  if (name == "US") return Country::US;
  throw DataError("unknown country '" + name + "'");
}

UnitKind unit_kind_from_name(const std::string& name) {
  if (name == "candidate") return UnitKind::Candidate;
  if (name == "party") return UnitKind::Party;
  if (name == "respondent") return UnitKind::Respondent;
  throw DataError("unknown unit kind '" + name + "'");
}

Stance stance_from_token(const std::string& token, const std::string& context) {
  auto s = stance_from_label(token);
  if (!s) throw DataError(context + ": unknown stance token '" + token + "'");
  return *s;
}

}  // namespace

std::string group_name(Group g) {
  switch (g) {
    case Group::Left: return "Left";
    case Group::Center: return "Center";
    case Group::Right: return "Right";
  }
  throw ConfigError("group_name: bad enum");
}

std::string unit_kind_name(UnitKind k) {
  switch (k) {
    case UnitKind::Candidate: return "candidate";
    case UnitKind::Party: return "party";
    case UnitKind::Respondent: return "respondent";
  }
  throw ConfigError("unit_kind_name: bad enum");
}

Group assign_group(Country country, const std::string& party_or_ideology) {
  static const std::unordered_map<std::string, Group> ch = {
      {"SVP", Group::Right},        {"SP", Group::Left},
      {"FDP", Group::Right},        {"The Center", Group::Center},
      {"Green Party", Group::Left}, {"GLP", Group::Center},
  };
  static const std::unordered_map<std::string, Group> de = {
      {"CDU/CSU", Group::Right}, {"SPD", Group::Center},
      {"Grüne", Group::Left},    {"FDP", Group::Center},
      {"Die Linke", Group::Left}, {"AfD", Group::Right},
  };
  static const std::unordered_map<std::string, Group> us = {
      {"Extremely liberal", Group::Left},
      {"Liberal", Group::Left},
      {"Slightly liberal", Group::Center},
      {"Moderate", Group::Center},
      {"Slightly conservative", Group::Center},
      {"Conservative", Group::Right},
      {"Extremely conservative", Group::Right},
  };
  const auto* table = country == Country::CH ? &ch : country == Country::DE ? &de : &us;
  auto it = table->find(party_or_ideology);
  if (it == table->end()) {
    throw DataError("no group assignment for '" + party_or_ideology + "' in " +
                    country_name(country));
  }
  return it->second;
}

const Question* Dataset::find_question(const std::string& id) const {
  for (const auto& q : questions) {
    if (q.id == id) return &q;
  }
  return nullptr;
}

const Unit* Dataset::find_unit(const std::string& id) const {
  for (const auto& u : units) {
    if (u.unit_id == id) return &u;
  }
  return nullptr;
}

namespace {

LabelSpace label_space_from_json(const Json& arr, const std::string& context) {
  if (!arr.is_array()) throw DataError(context + ": label_space must be an array");
  std::vector<Stance> stances;
  for (const auto& v : arr) {
    stances.push_back(stance_from_token(v.get<std::string>(), context));
  }
  if (stances == LabelSpace::binary().stances()) return LabelSpace::binary();
  if (stances == LabelSpace::ternary().stances()) return LabelSpace::ternary();
  throw DataError(context + ": label_space must be [Yes,No] or [Yes,No,Neutral]");
}

void validate_dataset(const Dataset& ds) {
  if (ds.questions.empty()) throw DataError("dataset has no questions");
  if (ds.units.empty()) throw DataError("dataset has no units");

  std::unordered_set<std::string> qids;
  std::set<std::string> topics;
  for (const auto& q : ds.questions) {
    if (q.id.empty()) throw DataError("question with empty id");
    if (!qids.insert(q.id).second) throw DataError("duplicate question id '" + q.id + "'");
    if (q.text.empty()) throw DataError("question '" + q.id + "' has empty text");
    if (ds.survey == SurveyKind::Smartvote && q.topic.empty()) {
      throw DataError("smartvote question '" + q.id + "' has no topic");
    }
    if (!q.topic.empty()) topics.insert(q.topic);
    for (const auto& [scheme, map] : q.scheme_maps) {
      if (map.size() != q.raw_options.size()) {
        throw DataError("question '" + q.id + "': scheme '" + scheme +
                        "' does not cover every raw option");
      }
    }
  }
  if (ds.survey == SurveyKind::Smartvote && ds.recoding_scheme != "none" &&
      topics.size() != 12) {
    throw DataError("smartvote dataset must carry exactly 12 topics, found " +
                    std::to_string(topics.size()));
  }

  const bool raw = ds.recoding_scheme == "none";
  std::unordered_set<std::string> uids;
  for (const auto& u : ds.units) {
    const std::string ctx = "unit '" + u.unit_id + "'";
    if (u.unit_id.empty()) throw DataError("unit with empty id");
    if (!uids.insert(u.unit_id).second) throw DataError("duplicate unit id '" + u.unit_id + "'");
    if (raw) {
      if (!u.responses.empty()) throw DataError(ctx + ": raw file carries stance responses");
      for (const auto& [qid, idx] : u.raw_responses) {
        const Question* q = ds.find_question(qid);
        if (q == nullptr) throw DataError(ctx + ": response to unknown question '" + qid + "'");
        if (idx < 1 || static_cast<std::size_t>(idx) > q->raw_options.size()) {
          throw DataError(ctx + ": option index " + std::to_string(idx) +
                          " out of range for '" + qid + "'");
        }
      }
    } else {
      if (!u.raw_responses.empty()) throw DataError(ctx + ": canonical file carries raw indices");
      for (const auto& [qid, stance] : u.responses) {
        if (ds.find_question(qid) == nullptr) {
          throw DataError(ctx + ": response to unknown question '" + qid + "'");
        }
        if (!ds.label_space.contains(stance)) {
          throw DataError(ctx + ": stance outside label space on '" + qid + "'");
        }
      }
    }
    for (const auto& [qid, _] : u.comments) {
      if (ds.find_question(qid) == nullptr) {
        throw DataError(ctx + ": comment on unknown question '" + qid + "'");
      }
    }
  }
}

}  // namespace

Dataset parse_dataset_json(const std::string& json_text) {
  const Json j = detail::parse_json(json_text, "dataset");
  Dataset ds;
  ds.survey = survey_from_name(detail::require(j, "survey", "dataset").get<std::string>());
  ds.label_space = label_space_from_json(detail::require(j, "label_space", "dataset"), "dataset");
  ds.recoding_scheme = detail::require(j, "recoding_scheme", "dataset").get<std::string>();

  for (const auto& qj : detail::require(j, "questions", "dataset")) {
    Question q;
    q.id = detail::require(qj, "id", "question").get<std::string>();
    q.text = detail::require(qj, "text", q.id).get<std::string>();
    q.topic = qj.value("topic", "");
    if (qj.contains("raw_options")) {
      for (const auto& o : qj["raw_options"]) q.raw_options.push_back(o.get<std::string>());
    }
    if (qj.contains("scheme_maps")) {
      for (const auto& [scheme, arr] : qj["scheme_maps"].items()) {
        std::vector<Stance> map;
        for (const auto& v : arr) map.push_back(stance_from_token(v.get<std::string>(), q.id));
        q.scheme_maps[scheme] = std::move(map);
      }
    }
    ds.questions.push_back(std::move(q));
  }

  const bool raw = ds.recoding_scheme == "none";
  for (const auto& uj : detail::require(j, "units", "dataset")) {
    Unit u;
    u.unit_id = detail::require(uj, "unit_id", "unit").get<std::string>();
    u.kind = unit_kind_from_name(detail::require(uj, "kind", u.unit_id).get<std::string>());
    u.country = country_from_name(detail::require(uj, "country", u.unit_id).get<std::string>());
    u.party_or_ideology =
        detail::require(uj, "party_or_ideology", u.unit_id).get<std::string>();
    u.group = assign_group(u.country, u.party_or_ideology);
    if (uj.contains("group") && uj["group"].get<std::string>() != group_name(u.group)) {
      throw DataError("unit '" + u.unit_id + "': stored group contradicts the lookup table");
    }
    for (const auto& [qid, v] : detail::require(uj, "responses", u.unit_id).items()) {
      if (raw) {
        if (!v.is_number_integer()) {
          throw DataError("unit '" + u.unit_id + "': raw response for '" + qid +
                          "' must be an option index");
        }
        u.raw_responses[qid] = v.get<int>();
      } else {
        u.responses[qid] = stance_from_token(v.get<std::string>(), u.unit_id);
      }
    }
    if (uj.contains("comments")) {
      for (const auto& [qid, v] : uj["comments"].items()) {
        u.comments[qid] = v.get<std::string>();
      }
    }
    ds.units.push_back(std::move(u));
  }

  validate_dataset(ds);
  return ds;
}

std::string dataset_to_json(const Dataset& ds) {
  Json j;
  j["survey"] = survey_name(ds.survey);
  Json ls = Json::array();
  for (Stance s : ds.label_space.stances()) ls.push_back(stance_label(s));
  j["label_space"] = ls;
  j["recoding_scheme"] = ds.recoding_scheme;

  Json questions = Json::array();
  for (const auto& q : ds.questions) {
    Json qj;
    qj["id"] = q.id;
    qj["text"] = q.text;
    qj["topic"] = q.topic;
    qj["raw_options"] = q.raw_options;
    Json maps = Json::object();
    for (const auto& [scheme, map] : q.scheme_maps) {
      Json arr = Json::array();
      for (Stance s : map) arr.push_back(stance_label(s));
      maps[scheme] = arr;
    }
    qj["scheme_maps"] = maps;
    questions.push_back(qj);
  }
  j["questions"] = questions;

  Json units = Json::array();
  for (const auto& u : ds.units) {
    Json uj;
    uj["unit_id"] = u.unit_id;
    uj["kind"] = unit_kind_name(u.kind);
    uj["country"] = country_name(u.country);
    uj["party_or_ideology"] = u.party_or_ideology;
    uj["group"] = group_name(u.group);
    Json responses = Json::object();
    if (ds.recoding_scheme == "none") {
      for (const auto& [qid, idx] : u.raw_responses) responses[qid] = idx;
    } else {
      for (const auto& [qid, s] : u.responses) responses[qid] = stance_label(s);
    }
    uj["responses"] = responses;
    if (!u.comments.empty()) {
      Json comments = Json::object();
      for (const auto& [qid, c] : u.comments) comments[qid] = c;
      uj["comments"] = comments;
    }
    units.push_back(uj);
  }
  j["units"] = units;
  return j.dump(2) + "\n";
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_dataset_json(buf.str());
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  detail::write_text_file(path, dataset_to_json(dataset));
}

namespace {

Dataset recode_with_scheme(const Dataset& raw, const std::string& scheme,
                           const LabelSpace& target_space) {
  if (raw.recoding_scheme != "none") {
    throw DataError("recode expects a raw dataset, got scheme '" + raw.recoding_scheme + "'");
  }
  Dataset out = raw;
  out.recoding_scheme = scheme;
  out.label_space = target_space;
  for (const auto& q : out.questions) {
    if (q.scheme_maps.find(scheme) == q.scheme_maps.end()) {
      throw DataError("question '" + q.id + "' lacks scheme map '" + scheme + "'");
    }
  }
  for (auto& u : out.units) {
    u.responses.clear();
    for (const auto& [qid, idx] : u.raw_responses) {
      const Question* q = out.find_question(qid);
      const Stance s = q->scheme_maps.at(scheme)[static_cast<std::size_t>(idx - 1)];
      if (!target_space.contains(s)) {
        throw DataError("question '" + qid + "': scheme '" + scheme +
                        "' maps option " + std::to_string(idx) + " outside the label space");
      }
      u.responses[qid] = s;
    }
    u.raw_responses.clear();
  }
  validate_dataset(out);  // re-check shape rules under the new scheme
  return out;
}

}  // namespace

Dataset recode_anes(const Dataset& raw, const std::string& scheme) {
  if (raw.survey != SurveyKind::Anes) throw ConfigError("recode_anes: dataset is not anes");
  if (scheme != "conservative" && scheme != "aggressive") {
    throw ConfigError("recode_anes: scheme must be 'conservative' or 'aggressive'");
  }
  return recode_with_scheme(raw, scheme, LabelSpace::ternary());
}

Dataset collapse_likert(const Dataset& raw) {
  if (raw.survey != SurveyKind::Smartvote) {
    throw ConfigError("collapse_likert: dataset is not smartvote");
  }
  return recode_with_scheme(raw, "binary", LabelSpace::binary());
}

Dataset invert_answers(const Dataset& dataset) {
  if (dataset.label_space != LabelSpace::binary()) {
    throw ConfigError("invert_answers: label space must be binary");
  }
  Dataset out = dataset;
  for (auto& u : out.units) {
    for (auto& [qid, s] : u.responses) {
      s = s == Stance::Yes ? Stance::No : Stance::Yes;
    }
  }
  return out;
}

Split split_topic_stratified(const Dataset& dataset, std::uint64_t seed) {
  std::map<std::string, std::vector<std::string>> by_topic;
  for (const auto& q : dataset.questions) {
    if (q.topic.empty()) {
      throw ConfigError("split_topic_stratified: question '" + q.id + "' has no topic");
    }
    by_topic[q.topic].push_back(q.id);
  }
  Rng rng(Rng::derive(seed, "topic_split"));
  Split split;
  split.strategy = "topic_stratified";
  split.seed = seed;
  std::unordered_set<std::string> test;
  for (const auto& [topic, ids] : by_topic) {
    const auto& pick = ids[rng.next_below(ids.size())];
    split.test_ids.push_back(pick);
    test.insert(pick);
  }
  for (const auto& q : dataset.questions) {
    if (test.find(q.id) == test.end()) split.train_ids.push_back(q.id);
  }
  return split;
}

Split split_random(const Dataset& dataset, std::uint64_t seed, std::size_t n_test) {
  if (n_test == 0 || n_test >= dataset.questions.size()) {
    throw ConfigError("split_random: n_test must leave a non-empty train set");
  }
  std::vector<std::string> ids;
  ids.reserve(dataset.questions.size());
  for (const auto& q : dataset.questions) ids.push_back(q.id);
  Rng rng(Rng::derive(seed, "random_split"));
  rng.shuffle(ids);
  std::unordered_set<std::string> test(ids.begin(), ids.begin() + static_cast<long>(n_test));

  Split split;
  split.strategy = "random";
  split.seed = seed;
  for (const auto& q : dataset.questions) {
    (test.count(q.id) ? split.test_ids : split.train_ids).push_back(q.id);
  }
  return split;
}

Split split_fixed_external(const Dataset& dataset,
                           const std::vector<std::string>& test_ids) {
  if (test_ids.empty()) throw ConfigError("split_fixed_external: empty test set");
  std::unordered_set<std::string> test;
  for (const auto& id : test_ids) {
    if (dataset.find_question(id) == nullptr) {
      throw DataError("split_fixed_external: unknown test question '" + id + "'");
    }
    if (!test.insert(id).second) {
      throw DataError("split_fixed_external: duplicate test question '" + id + "'");
    }
  }
  Split split;
  split.strategy = "fixed_external";
  for (const auto& q : dataset.questions) {
    (test.count(q.id) ? split.test_ids : split.train_ids).push_back(q.id);
  }
  if (split.train_ids.empty()) throw DataError("split_fixed_external: empty train set");
  return split;
}

Split load_split(const std::string& path) {
  const Json j = detail::load_json_file(path);
  Split split;
  split.strategy = detail::require(j, "strategy", path).get<std::string>();
  split.seed = j.value("seed", std::uint64_t{0});
  for (const auto& v : detail::require(j, "train_ids", path)) {
    split.train_ids.push_back(v.get<std::string>());
  }
  for (const auto& v : detail::require(j, "test_ids", path)) {
    split.test_ids.push_back(v.get<std::string>());
  }
  return split;
}

void save_split(const Split& split, const std::string& path) {
  Json j;
  j["strategy"] = split.strategy;
  j["seed"] = split.seed;
  j["train_ids"] = split.train_ids;
  j["test_ids"] = split.test_ids;
  detail::write_text_file(path, j.dump(2) + "\n");
}

void validate_split(const Dataset& dataset, const Split& split) {
  if (split.test_ids.empty()) throw DataError("split: empty test set");
  if (split.train_ids.empty()) throw DataError("split: empty train set");
  std::unordered_set<std::string> seen;
  for (const auto* ids : {&split.train_ids, &split.test_ids}) {
    for (const auto& id : *ids) {
      if (dataset.find_question(id) == nullptr) {
        throw DataError("split references unknown question '" + id + "'");
      }
      if (!seen.insert(id).second) {
        throw DataError("split: question '" + id + "' appears twice");
      }
    }
  }
  if (split.strategy == "topic_stratified") {
    std::set<std::string> all_topics;
    std::set<std::string> test_topics;
    for (const auto& q : dataset.questions) all_topics.insert(q.topic);
    for (const auto& id : split.test_ids) test_topics.insert(dataset.find_question(id)->topic);
    if (test_topics.size() != split.test_ids.size() || test_topics != all_topics) {
      throw DataError("split: topic_stratified requires exactly one test question per topic");
    }
  }
}

}  // namespace stancelab
