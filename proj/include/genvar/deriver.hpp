#ifndef GENVAR_DERIVER_HPP
#define GENVAR_DERIVER_HPP

#include <string>
#include <string_view>
#include <vector>

#include "genvar/gender.hpp"
#include "genvar/neutral_rewriter.hpp"
#include "genvar/pronouns.hpp"

namespace genvar {

// One substitution between a translation and its all-neutral rewrite.
// `position` is the token index, shared by both sentences.
struct AlignedEdit {
  std::size_t position = 0;
  std::string original;  // token core as written
  std::string neutral;
  EditKind kind = EditKind::Pronoun;
  // Pronoun edits only: the table cell of the original token, with the
  // her/his ambiguity resolved through the neutral surface.
  PronounCategory category = PronounCategory::Subject;
  Gender gender = Gender::Neutral;
  // False when the neutral token contradicts an unambiguous original; the
  // original's reading wins.
  bool consistent = true;
};

// Pairs up the tokens of a sentence and its all-neutral rewrite. Both must
// tokenize to the same length, and every differing position must be a
// gendered pronoun replaced by a neutral one or a singular verb replaced
// by its plural form. Anything else raises AlignmentError.
std::vector<AlignedEdit> align(std::string_view original, std::string_view neutral);

// Rewrites `original` into the target gender (feminine or masculine). The
// neutral rewrite pins down the grammatical category of each replaced
// pronoun, which fully determines the target surface. Agreement verbs keep
// the original's singular forms, so the output differs from the original
// only at pronoun positions. The original must be uniformly gendered;
// sentences mixing feminine and masculine pronouns are rejected.
std::string derive_gendered(std::string_view original, std::string_view neutral, Gender target);

}  // namespace genvar

#endif
