#include "stancelab/schema.hpp"

#include <array>
#include <cctype>
#include <string_view>

namespace stancelab {

namespace {

constexpr std::array<std::string_view, 4> kTags = {
    "<reasoning>", "</reasoning>", "<answer>", "</answer>"};

struct TagScan {
  std::size_t count = 0;
  std::size_t first = std::string::npos;
};

TagScan scan_tag(const std::string& text, std::string_view tag) {
  TagScan out;
  std::size_t pos = text.find(tag);
  while (pos != std::string::npos) {
    if (out.count == 0) out.first = pos;
    ++out.count;
    pos = text.find(tag, pos + 1);
  }
  return out;
}

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string render(const std::string& reasoning, Stance stance) {
  std::string out;
  out.reserve(reasoning.size() + 48);
  out += "<reasoning>";
  out += reasoning;
  out += "</reasoning><answer>";
  out += stance_letter(stance);
  out += ") ";
  out += stance_label(stance);
  out += "</answer>";
  return out;
}

ParseResult parse(const std::string& text, const LabelSpace& space) {
  ParseResult result;
  std::array<TagScan, 4> scans;
  for (std::size_t i = 0; i < kTags.size(); ++i) scans[i] = scan_tag(text, kTags[i]);

  // A tag counts iff it occurs exactly once and starts after the previously
  // counted tag. Out-of-order or duplicated tags drop out; the remaining
  // ones still count if they keep the schema order among themselves.
  std::array<bool, 4> counted = {false, false, false, false};
  std::size_t cursor = 0;
  bool any = false;
  for (std::size_t i = 0; i < kTags.size(); ++i) {
    if (scans[i].count != 1) continue;
    if (any && scans[i].first < cursor) continue;
    counted[i] = true;
    any = true;
    cursor = scans[i].first + kTags[i].size();
    ++result.tags_found;
  }

  if (counted[0] && counted[1]) {
    const std::size_t begin = scans[0].first + kTags[0].size();
    result.reasoning_body = text.substr(begin, scans[1].first - begin);
  }
  if (counted[2] && counted[3]) {
    const std::size_t begin = scans[2].first + kTags[2].size();
    result.answer_body = text.substr(begin, scans[3].first - begin);
  }
  if (result.answer_body) result.stance = extract_stance(*result.answer_body, space);
  result.well_formed = result.tags_found == 4;
  return result;
}

std::optional<Stance> extract_stance(const std::string& answer_body,
                                     const LabelSpace& space) {
  const std::string_view body = trim(answer_body);
  if (body.empty()) return std::nullopt;

  // Leading letter code: "A", "b)", "C:" but not "About".
  if (auto s = stance_from_letter(body.front())) {
    if (body.size() == 1 || !is_word_char(static_cast<unsigned char>(body[1]))) {
      return space.contains(*s) ? std::optional<Stance>(*s) : std::nullopt;
    }
  }

  // First standalone label word, scanning left to right.
  std::size_t i = 0;
  while (i < body.size()) {
    if (!is_word_char(static_cast<unsigned char>(body[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < body.size() && is_word_char(static_cast<unsigned char>(body[j]))) ++j;
    if (auto s = stance_from_label(std::string(body.substr(i, j - i)))) {
      return space.contains(*s) ? std::optional<Stance>(*s) : std::nullopt;
    }
    i = j;
  }
  return std::nullopt;
}

}  // namespace stancelab
