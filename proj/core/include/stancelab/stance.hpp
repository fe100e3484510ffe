#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stancelab {

// Canonical stance order. Ties in modal counts break toward the smaller
// enum value (Yes before No before Neutral).
enum class Stance : std::uint8_t { Yes = 0, No = 1, Neutral = 2 };

// Answer-option letters are a fixed bijection: A=Yes, B=No, C=Neutral.
char stance_letter(Stance s);
const std::string& stance_label(Stance s);
std::optional<Stance> stance_from_label(const std::string& label);
std::optional<Stance> stance_from_letter(char letter);

// A label space is the ordered list of admissible stances for a survey:
// {Yes,No} for binary questionnaires, {Yes,No,Neutral} for ternary ones.
class LabelSpace {
 public:
  static LabelSpace binary();
  static LabelSpace ternary();

  const std::vector<Stance>& stances() const { return stances_; }
  std::size_t size() const { return stances_.size(); }
  bool contains(Stance s) const;
  bool operator==(const LabelSpace& other) const = default;

 private:
  explicit LabelSpace(std::vector<Stance> stances) : stances_(std::move(stances)) {}
  std::vector<Stance> stances_;
};

}  // namespace stancelab
