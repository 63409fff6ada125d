#ifndef GENVAR_GENDER_HPP
#define GENVAR_GENDER_HPP

#include <array>
#include <optional>
#include <string_view>

namespace genvar {

enum class Gender { Feminine, Masculine, Neutral };

constexpr std::array<Gender, 3> kAllGenders = {Gender::Feminine, Gender::Masculine,
                                               Gender::Neutral};

constexpr std::string_view to_string(Gender g) {
  switch (g) {
    case Gender::Feminine: return "feminine";
    case Gender::Masculine: return "masculine";
    case Gender::Neutral: return "neutral";
  }
  return "";
}

std::optional<Gender> gender_from_string(std::string_view s);

}  // namespace genvar

#endif
