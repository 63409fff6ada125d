#include "genvar/pronouns.hpp"

#include <fstream>

#include "genvar/errors.hpp"
#include "genvar/text.hpp"

namespace genvar {

std::optional<Gender> gender_from_string(std::string_view s) {
  std::string l = to_lower(s);
  if (l == "feminine" || l == "f" || l == "female") return Gender::Feminine;
  if (l == "masculine" || l == "m" || l == "male") return Gender::Masculine;
  if (l == "neutral" || l == "n") return Gender::Neutral;
  return std::nullopt;
}

namespace {

struct TableEntry {
  PronounCategory category;
  Gender gender;
  std::string_view surface;
};

// The full 15-cell table. Row order mirrors the category declaration.
constexpr std::array<TableEntry, 15> kPronounTable = {{
    {PronounCategory::Subject, Gender::Feminine, "she"},
    {PronounCategory::Subject, Gender::Masculine, "he"},
    {PronounCategory::Subject, Gender::Neutral, "they"},
    {PronounCategory::Object, Gender::Feminine, "her"},
    {PronounCategory::Object, Gender::Masculine, "him"},
    {PronounCategory::Object, Gender::Neutral, "them"},
    {PronounCategory::PossessiveDeterminer, Gender::Feminine, "her"},
    {PronounCategory::PossessiveDeterminer, Gender::Masculine, "his"},
    {PronounCategory::PossessiveDeterminer, Gender::Neutral, "their"},
    {PronounCategory::PossessivePronoun, Gender::Feminine, "hers"},
    {PronounCategory::PossessivePronoun, Gender::Masculine, "his"},
    {PronounCategory::PossessivePronoun, Gender::Neutral, "theirs"},
    {PronounCategory::Reflexive, Gender::Feminine, "herself"},
    {PronounCategory::Reflexive, Gender::Masculine, "himself"},
    {PronounCategory::Reflexive, Gender::Neutral, "themselves"},
}};

}  // namespace

std::vector<PronounCell> classify(std::string_view token) {
  std::string l = to_lower(token);
  std::vector<PronounCell> cells;
  for (const auto& e : kPronounTable) {
    if (e.surface == l) cells.push_back({e.category, e.gender});
  }
  return cells;
}

std::string_view map_pronoun(PronounCategory category, Gender gender) {
  for (const auto& e : kPronounTable) {
    if (e.category == category && e.gender == gender) return e.surface;
  }
  return "";  // unreachable: the table is total
}

bool is_gendered_pronoun(std::string_view token) {
  for (const auto& c : classify(token)) {
    if (c.gender != Gender::Neutral) return true;
  }
  return false;
}

bool is_neutral_pronoun(std::string_view token) {
  for (const auto& c : classify(token)) {
    if (c.gender == Gender::Neutral) return true;
  }
  return false;
}

void AgreementTable::add(std::string_view singular, std::string_view plural) {
  singular_to_plural_[to_lower(singular)] = to_lower(plural);
  plural_to_singular_[to_lower(plural)] = to_lower(singular);
}

const AgreementTable& AgreementTable::builtin() {
  static const AgreementTable table = [] {
    AgreementTable t;
    t.add("is", "are");
    t.add("was", "were");
    t.add("does", "do");
    t.add("has", "have");
    // Negation contractions follow the same number change.
    t.add("isn't", "aren't");
    t.add("wasn't", "weren't");
    t.add("doesn't", "don't");
    t.add("hasn't", "haven't");
    return t;
  }();
  return table;
}

AgreementTable AgreementTable::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open irregular-verb table");
  AgreementTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string trimmed = normalize_whitespace(line);
    if (trimmed.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(path, lineno, "expected singular<TAB>plural");
    std::string sing = normalize_whitespace(line.substr(0, tab));
    std::string plur = normalize_whitespace(line.substr(tab + 1));
    if (sing.empty() || plur.empty())
      throw ParseError(path, lineno, "empty verb form");
    t.add(sing, plur);
  }
  return t;
}

bool AgreementTable::is_irregular_singular(std::string_view verb) const {
  return singular_to_plural_.count(to_lower(verb)) > 0;
}

bool AgreementTable::is_irregular_plural(std::string_view verb) const {
  return plural_to_singular_.count(to_lower(verb)) > 0;
}

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) {
  switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u': return true;
    default: return false;
  }
}

// Regular third-singular inflection, stripped. "watches" -> "watch",
// "carries" -> "carry", "wants" -> "want". Forms without a recognizable
// suffix are returned unknown.
std::optional<std::string> strip_third_singular(const std::string& v) {
  if (v.size() >= 5 && ends_with(v, "ies") && !is_vowel(v[v.size() - 4])) {
    return v.substr(0, v.size() - 3) + "y";
  }
  for (std::string_view suf : {"sses", "zzes", "ches", "shes", "xes", "oes"}) {
    if (ends_with(v, suf)) return v.substr(0, v.size() - 2);
  }
  if (v.size() >= 2 && ends_with(v, "s") && !ends_with(v, "ss") && !ends_with(v, "us") &&
      !ends_with(v, "is")) {
    return v.substr(0, v.size() - 1);
  }
  return std::nullopt;
}

// Inverse: plural (base) form to third singular.
std::string add_third_singular(const std::string& v) {
  if (v.size() >= 2 && v.back() == 'y' && !is_vowel(v[v.size() - 2])) {
    return v.substr(0, v.size() - 1) + "ies";
  }
  if (ends_with(v, "s") || ends_with(v, "sh") || ends_with(v, "ch") || ends_with(v, "x") ||
      ends_with(v, "z") || ends_with(v, "o")) {
    return v + "es";
  }
  return v + "s";
}

}  // namespace

VerbForm AgreementTable::convert(std::string_view verb, AgreementDirection dir) const {
  std::string lower = to_lower(verb);
  if (dir == AgreementDirection::SingularToPlural) {
    if (auto it = singular_to_plural_.find(lower); it != singular_to_plural_.end()) {
      return {it->second, true};
    }
    if (plural_to_singular_.count(lower)) return {lower, true};  // already plural
    if (auto base = strip_third_singular(lower)) return {*base, true};
    return {lower, false};
  }
  if (auto it = plural_to_singular_.find(lower); it != plural_to_singular_.end()) {
    return {it->second, true};
  }
  if (singular_to_plural_.count(lower)) return {lower, true};  // already singular
  // A trailing -s usually means the form is third-singular already, but
  // -ss/-us/-is endings are base forms (miss, focus) since inflection
  // would have added -es.
  if (ends_with(lower, "s") && !ends_with(lower, "ss") && !ends_with(lower, "us") &&
      !ends_with(lower, "is")) {
    return {lower, false};
  }
  return {add_third_singular(lower), true};
}

VerbForm agree_verb(std::string_view verb, AgreementDirection dir) {
  return AgreementTable::builtin().convert(verb, dir);
}

}  // namespace genvar
