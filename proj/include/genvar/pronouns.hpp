#ifndef GENVAR_PRONOUNS_HPP
#define GENVAR_PRONOUNS_HPP

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "genvar/gender.hpp"

namespace genvar {

enum class PronounCategory { Subject, Object, PossessiveDeterminer, PossessivePronoun, Reflexive };

constexpr std::array<PronounCategory, 5> kAllCategories = {
    PronounCategory::Subject, PronounCategory::Object, PronounCategory::PossessiveDeterminer,
    PronounCategory::PossessivePronoun, PronounCategory::Reflexive};

constexpr std::string_view to_string(PronounCategory c) {
  switch (c) {
    case PronounCategory::Subject: return "subject";
    case PronounCategory::Object: return "object";
    case PronounCategory::PossessiveDeterminer: return "possessive_determiner";
    case PronounCategory::PossessivePronoun: return "possessive_pronoun";
    case PronounCategory::Reflexive: return "reflexive";
  }
  return "";
}

// One cell of the 5x3 personal-pronoun table.
struct PronounCell {
  PronounCategory category;
  Gender gender;
  bool operator==(const PronounCell&) const = default;
};

// All table cells whose surface form equals `token` (case-insensitive).
// Empty result means the token is not a personal pronoun. At most two
// cells share a surface ("her", "his").
std::vector<PronounCell> classify(std::string_view token);

// The unique surface form for a table cell, lowercase.
std::string_view map_pronoun(PronounCategory category, Gender gender);

bool is_gendered_pronoun(std::string_view token);   // some cell with feminine/masculine gender
bool is_neutral_pronoun(std::string_view token);    // some cell with neutral gender

// Subject-verb agreement for the she/he <-> they number change. Finite
// forms only; anything the table or suffix rules do not recognize comes
// back unchanged with known == false.
enum class AgreementDirection { SingularToPlural, PluralToSingular };

struct VerbForm {
  std::string text;
  bool known = false;
};

class AgreementTable {
 public:
  // Built-in irregulars: is/are, was/were, does/do, has/have plus their
  // negation contractions.
  static const AgreementTable& builtin();

  // One `singular<TAB>plural` pair per line; '#' starts a comment.
  static AgreementTable from_file(const std::string& path);

  void add(std::string_view singular, std::string_view plural);

  VerbForm convert(std::string_view verb, AgreementDirection dir) const;

  bool is_irregular_singular(std::string_view verb) const;
  bool is_irregular_plural(std::string_view verb) const;
  std::size_t size() const { return singular_to_plural_.size(); }

 private:
  std::unordered_map<std::string, std::string> singular_to_plural_;
  std::unordered_map<std::string, std::string> plural_to_singular_;
};

VerbForm agree_verb(std::string_view verb, AgreementDirection dir);

}  // namespace genvar

#endif
