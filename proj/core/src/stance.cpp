#include "stancelab/stance.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace stancelab {

namespace {
const std::array<std::string, 3> kLabels = {"Yes", "No", "Neutral"};
}

char stance_letter(Stance s) {
  return static_cast<char>('A' + static_cast<int>(s));
}

const std::string& stance_label(Stance s) {
  return kLabels[static_cast<std::size_t>(s)];
}

std::optional<Stance> stance_from_label(const std::string& label) {
  std::string low(label.size(), '\0');
  std::transform(label.begin(), label.end(), low.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (low == "yes") return Stance::Yes;
  if (low == "no") return Stance::No;
  if (low == "neutral") return Stance::Neutral;
  return std::nullopt;
}

std::optional<Stance> stance_from_letter(char letter) {
  switch (std::toupper(static_cast<unsigned char>(letter))) {
    case 'A': return Stance::Yes;
    case 'B': return Stance::No;
    case 'C': return Stance::Neutral;
    default: return std::nullopt;
  }
}

LabelSpace LabelSpace::binary() {
  return LabelSpace({Stance::Yes, Stance::No});
}

LabelSpace LabelSpace::ternary() {
  return LabelSpace({Stance::Yes, Stance::No, Stance::Neutral});
}

bool LabelSpace::contains(Stance s) const {
  return std::find(stances_.begin(), stances_.end(), s) != stances_.end();
}

}  // namespace stancelab
