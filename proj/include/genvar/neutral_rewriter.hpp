#ifndef GENVAR_NEUTRAL_REWRITER_HPP
#define GENVAR_NEUTRAL_REWRITER_HPP

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "genvar/pronouns.hpp"
#include "genvar/text.hpp"

namespace genvar {

enum class EditKind { Pronoun, Agreement };

// One changed token of a rewrite. `begin` addresses the replaced core in
// the input sentence; surrounding punctuation is untouched.
struct TokenEdit {
  std::size_t token_index = 0;
  std::size_t begin = 0;
  std::string before;  // original core
  std::string after;   // replacement, casing transferred
  EditKind kind = EditKind::Pronoun;
  PronounCategory category = PronounCategory::Subject;  // pronoun edits only
  bool confident = true;
};

struct NeutralRewrite {
  std::string text;
  std::vector<TokenEdit> edits;

  bool changed() const { return !edits.empty(); }
};

// Word sets steering disambiguation and agreement repair. All lowercase.
struct RewriterLexicon {
  // Words that cannot start the noun phrase of a possessive determiner;
  // seeing one after her/his signals object / possessive pronoun use.
  std::set<std::string> function_words;
  // Verbs of perception or permission: "saw her play" reads her as object.
  std::set<std::string> perception_verbs;
  // Finite verbs that do not inflect for number (modals, past forms);
  // the agreement scan stops at them without repairing.
  std::set<std::string> frozen_verbs;
  // Words the agreement scan steps over (negation, common adverbs).
  std::set<std::string> skip_words;
  // Tokens that end the clause the rewritten subject governs.
  std::set<std::string> clause_boundaries;

  static const RewriterLexicon& builtin();
  // One `set_name<TAB>word` pair per line, '#' comments. Set names match
  // the field names above. Unknown names are an error.
  static RewriterLexicon from_file(const std::string& path);
};

// Chooses one category for the ambiguous surfaces her/his (and returns
// the unique category of any other personal pronoun). `index` addresses
// the pronoun inside `tokens`. Throws DataError for non-pronouns.
PronounCategory disambiguate(const std::vector<Token>& tokens, std::size_t index,
                             const RewriterLexicon& lexicon = RewriterLexicon::builtin(),
                             bool* confident = nullptr);

// Context passed as raw text: disambiguate("her", "She saw", "play baseball.").
PronounCategory disambiguate(std::string_view token, std::string_view left_context,
                             std::string_view right_context,
                             const RewriterLexicon& lexicon = RewriterLexicon::builtin(),
                             bool* confident = nullptr);

// Rewrites every feminine/masculine pronoun to its singular-they form and
// repairs subject-verb agreement for replaced she/he subjects. All other
// tokens are preserved byte for byte. Idempotent.
NeutralRewrite rewrite_neutral(std::string_view sentence,
                               const RewriterLexicon& lexicon = RewriterLexicon::builtin());

// Shorthand when only the text is wanted.
std::string neutralize(std::string_view sentence);

}  // namespace genvar

#endif
