#include "genvar/deriver.hpp"

#include <set>
#include <utility>

#include "genvar/errors.hpp"
#include "genvar/text.hpp"

namespace genvar {
namespace {

bool is_agreement_pair(const std::string& orig, const std::string& neut) {
  VerbForm plural = agree_verb(orig, AgreementDirection::SingularToPlural);
  if (plural.known && plural.text == neut) return true;
  VerbForm singular = agree_verb(neut, AgreementDirection::PluralToSingular);
  return singular.known && singular.text == orig;
}

}  // namespace

std::vector<AlignedEdit> align(std::string_view original, std::string_view neutral) {
  std::vector<Token> orig = tokenize(original);
  std::vector<Token> neut = tokenize(neutral);
  if (orig.size() != neut.size()) {
    throw AlignmentError("token counts differ (" + std::to_string(orig.size()) + " vs " +
                         std::to_string(neut.size()) +
                         "): only word-for-word substitutions can be aligned");
  }

  std::vector<AlignedEdit> edits;
  for (std::size_t i = 0; i < orig.size(); ++i) {
    if (orig[i].lower == neut[i].lower) continue;

    AlignedEdit edit;
    edit.position = i;
    edit.original = orig[i].core;
    edit.neutral = neut[i].core;

    std::vector<PronounCell> ocells = classify(orig[i].lower);
    std::vector<PronounCell> ncells = classify(neut[i].lower);
    bool orig_gendered = !ocells.empty() && ocells.front().gender != Gender::Neutral;
    bool neut_neutral = !ncells.empty() && ncells.front().gender == Gender::Neutral;

    if (orig_gendered && neut_neutral) {
      edit.kind = EditKind::Pronoun;
      edit.gender = ocells.front().gender;
      // The neutral column is injective, so the neutral side names exactly
      // one category.
      PronounCategory implied = ncells.front().category;
      bool matches = false;
      for (const PronounCell& c : ocells) matches = matches || c.category == implied;
      if (matches) {
        edit.category = implied;
      } else if (ocells.size() == 1) {
        // The neutral token disagrees with an unambiguous original; keep
        // the original's reading and flag the pair.
        edit.category = ocells.front().category;
        edit.consistent = false;
      } else {
        throw AlignmentError("token " + std::to_string(i) + ": \"" + orig[i].core +
                             "\" cannot be the " + std::string(to_string(implied)) +
                             " reading implied by neutral \"" + neut[i].core + "\"");
      }
    } else if (is_agreement_pair(orig[i].lower, neut[i].lower)) {
      edit.kind = EditKind::Agreement;
    } else {
      throw AlignmentError("token " + std::to_string(i) + ": \"" + orig[i].core + "\" vs \"" +
                           neut[i].core + "\" is neither a pronoun nor an agreement change");
    }
    edits.push_back(std::move(edit));
  }
  return edits;
}

std::string derive_gendered(std::string_view original, std::string_view neutral, Gender target) {
  if (target == Gender::Neutral) {
    throw DataError("derive_gendered target must be feminine or masculine");
  }

  std::vector<AlignedEdit> edits = align(original, neutral);
  std::vector<Token> tokens = tokenize(original);

  bool saw_feminine = false;
  bool saw_masculine = false;
  std::set<std::size_t> pronoun_positions;
  for (const AlignedEdit& e : edits) {
    if (e.kind != EditKind::Pronoun) continue;
    saw_feminine = saw_feminine || e.gender == Gender::Feminine;
    saw_masculine = saw_masculine || e.gender == Gender::Masculine;
    pronoun_positions.insert(e.position);
  }
  if (saw_feminine && saw_masculine) {
    throw DataError(
        "original mixes feminine and masculine pronouns; derivation covers "
        "uniform-gender sentences only");
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (is_gendered_pronoun(tokens[i].lower) && !pronoun_positions.count(i)) {
      throw AlignmentError("token " + std::to_string(i) + ": gendered pronoun \"" +
                           tokens[i].core + "\" was not neutralized in the neutral rewrite");
    }
  }

  std::vector<TextPatch> patches;
  for (const AlignedEdit& e : edits) {
    if (e.kind != EditKind::Pronoun) continue;
    const Token& tok = tokens[e.position];
    std::string_view surface = map_pronoun(e.category, target);
    patches.push_back({tok.core_begin, tok.core.size(), apply_case_pattern(tok.core, surface)});
  }
  return apply_patches(original, std::move(patches));
}

}  // namespace genvar
