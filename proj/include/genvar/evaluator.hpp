#ifndef GENVAR_EVALUATOR_HPP
#define GENVAR_EVALUATOR_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "genvar/corpus.hpp"
#include "genvar/metrics.hpp"
#include "genvar/tuples.hpp"

namespace genvar {

// Error taxonomy. The first four come from the human annotation pass over
// rule-based outputs; the rest from the automatic review of LLM neutral
// rewrites. One output may carry several labels at once.
enum class ErrorLabel {
  ExtraneousNounChange,
  ExtraneousPronounChange,
  MissingNounChange,
  MissingPronounChange,
  Comma,
  OtherCorrections,
  Pos,
  Sva,
  ThemToThemselves,
  NoneResponse,
  OtherModifications,
};

std::string_view to_string(ErrorLabel label);
std::optional<ErrorLabel> error_label_from_string(std::string_view s);

// Accepts a neutral-requested hypothesis on a negative instance when it
// matches the original or the rule-based neutralization of the original
// (all pronouns neutralized, agreement repaired). Only defined for
// negative tuples; other subtypes are rejected.
bool relaxed_neutral_match(std::string_view hypothesis, std::string_view original,
                           Subtype subtype);

// Token-level three-way diff of a non-matching hypothesis. `gendered_nouns`
// is the noun oracle: the word list plus a built-in set of masculine
// counterparts (the list itself skews feminine). Returns sorted unique
// labels; an exact match yields the empty set.
std::vector<ErrorLabel> classify_error(std::string_view original, std::string_view reference,
                                       std::string_view hypothesis,
                                       const WordList& gendered_nouns);

// True when the three variants differ only at tokens that are personal
// pronouns, agreement-verb pairs, or listed gendered nouns.
bool check_variant_consistency(std::string_view feminine, std::string_view masculine,
                               std::string_view neutral, const WordList& gendered_nouns);

// Noun-class test used by the error classifier: listed word or built-in
// masculine counterpart.
bool is_gendered_noun_token(std::string_view token, const WordList& gendered_nouns);

struct ScoredTuple {
  TestTuple tuple;
  std::string hypothesis;            // raw rewriter output
  std::string effective_hypothesis;  // literal "None" resolved to the original
  bool none_output = false;          // declared no change needed (literal None or identity)
  bool exact = false;
  bool relaxed = false;
  double wer = 0.0;
  std::vector<ErrorLabel> errors;
};

ScoredTuple score_tuple(const TestTuple& tuple, std::string_view hypothesis,
                        const WordList& gendered_nouns);

struct CellKey {
  std::string source_lang;
  Subtype subtype = Subtype::PronounOnly;
  OriginalGender original_gender = OriginalGender::Feminine;
  Gender requested_gender = Gender::Neutral;

  auto operator<=>(const CellKey&) const = default;
};

struct CellScore {
  std::size_t n = 0;
  std::size_t exact_count = 0;
  std::size_t relaxed_count = 0;
  std::size_t none_count = 0;
  std::size_t non_none_exact_count = 0;
  double wer_sum = 0.0;
  BleuStats bleu_stats;
  std::map<ErrorLabel, std::size_t> error_counts;

  double exact_rate() const { return n ? static_cast<double>(exact_count) / n : 0.0; }
  double relaxed_rate() const { return n ? static_cast<double>(relaxed_count) / n : 0.0; }
  double mean_wer() const { return n ? wer_sum / static_cast<double>(n) : 0.0; }
  double bleu() const { return bleu_stats.score(); }
  double none_rate() const { return n ? static_cast<double>(none_count) / n : 0.0; }
  std::size_t non_none_count() const { return n - none_count; }
  double non_none_match_rate() const {
    return non_none_count() ? static_cast<double>(non_none_exact_count) / non_none_count() : 0.0;
  }
};

struct OverallKey {
  std::string source_lang;
  OriginalGender original_gender = OriginalGender::Feminine;
  Gender requested_gender = Gender::Neutral;

  auto operator<=>(const OverallKey&) const = default;
};

// How often both the feminine and the masculine output of one negative
// instance left the original untouched.
struct NegativeGenderScore {
  std::size_t instances = 0;
  std::size_t both_match = 0;

  double rate() const {
    return instances ? static_cast<double>(both_match) / instances : 0.0;
  }
};

struct EvalReport {
  std::map<CellKey, CellScore> cells;
  // Positive subtypes pooled (pronoun-only + gendered-noun).
  std::map<OverallKey, CellScore> overall;
  std::map<std::string, NegativeGenderScore> negative_gender;  // by language
};

EvalReport aggregate(const std::vector<ScoredTuple>& scored);

// Machine rows: one JSON object per cell (plus overall and negative-gender
// rows) with language, subtype, original_gender, requested_gender, n,
// exact, relaxed, bleu, wer, none_rate, non_none_match_rate, errors.
void write_report_rows(const EvalReport& report, std::ostream& out);

// Aligned plain-text tables, one block per language: original-gender rows
// against requested-gender columns, negative Gender column included.
std::string render_report(const EvalReport& report);

}  // namespace genvar

#endif
