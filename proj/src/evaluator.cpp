#include "genvar/evaluator.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "genvar/errors.hpp"
#include "genvar/neutral_rewriter.hpp"
#include "genvar/pronouns.hpp"
#include "genvar/text.hpp"

namespace genvar {

namespace {

struct NamedErrorLabel {
  ErrorLabel label;
  std::string_view name;
};

constexpr std::array<NamedErrorLabel, 11> kErrorLabels = {{
    {ErrorLabel::ExtraneousNounChange, "extraneous_noun_change"},
    {ErrorLabel::ExtraneousPronounChange, "extraneous_pronoun_change"},
    {ErrorLabel::MissingNounChange, "missing_noun_change"},
    {ErrorLabel::MissingPronounChange, "missing_pronoun_change"},
    {ErrorLabel::Comma, "comma"},
    {ErrorLabel::OtherCorrections, "other_corrections"},
    {ErrorLabel::Pos, "pos"},
    {ErrorLabel::Sva, "sva"},
    {ErrorLabel::ThemToThemselves, "them_to_themselves"},
    {ErrorLabel::NoneResponse, "none_response"},
    {ErrorLabel::OtherModifications, "other_modifications"},
}};

// Masculine counterparts of the word list's noun entries, so extraneous
// and missing noun changes are caught on both sides.
const std::set<std::string>& masculine_nouns() {
  static const std::set<std::string> nouns = {
      "man",     "men",      "boy",        "boys",       "mr",      "mr.",
      "sir",     "father",   "dad",        "daddy",      "papa",    "brother",
      "son",     "husband",  "uncle",      "nephew",     "grandfather",
      "grandpa", "grandson", "stepfather", "stepson",    "widower", "king",
      "prince",  "duke",     "emperor",    "actor",      "waiter",  "host",
      "heir",    "hero",     "groom",      "bridegroom", "lord",    "gentleman",
      "gentlemen", "male",   "masculine",  "fatherhood", "boyfriend",
  };
  return nouns;
}

bool is_verb_agreement_pair(std::string_view a, std::string_view b) {
  VerbForm plural = agree_verb(a, AgreementDirection::SingularToPlural);
  if (plural.known && plural.text == b) return true;
  VerbForm singular = agree_verb(a, AgreementDirection::PluralToSingular);
  return singular.known && singular.text == b;
}

// Auxiliary families: a swap inside one family that is not a pure number
// change reads as a correction (tense, mood), not a rewriting error.
bool same_aux_family(std::string_view a, std::string_view b) {
  static const std::array<std::set<std::string_view>, 3> families = {{
      {"have", "has", "had", "haven't", "hasn't", "hadn't", "having"},
      {"do", "does", "did", "don't", "doesn't", "didn't", "doing", "done"},
      {"is", "are", "was", "were", "am", "be", "been", "being", "isn't", "aren't", "wasn't",
       "weren't"},
  }};
  for (const auto& family : families) {
    if (family.count(a) && family.count(b)) return true;
  }
  return false;
}

std::string strip_commas(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c != ',') out.push_back(c);
  }
  return out;
}

bool comma_only_diff(std::string_view a, std::string_view b) {
  return normalize_whitespace(strip_commas(a)) == normalize_whitespace(strip_commas(b));
}

bool is_pronoun_token(const Token& t) { return !classify(t.lower).empty(); }

}  // namespace

std::string_view to_string(ErrorLabel label) {
  for (const auto& e : kErrorLabels) {
    if (e.label == label) return e.name;
  }
  return "";
}

std::optional<ErrorLabel> error_label_from_string(std::string_view s) {
  for (const auto& e : kErrorLabels) {
    if (e.name == s) return e.label;
  }
  return std::nullopt;
}

bool is_gendered_noun_token(std::string_view token, const WordList& gendered_nouns) {
  return gendered_nouns.contains(token) || masculine_nouns().count(normalize_word(token)) > 0;
}

bool relaxed_neutral_match(std::string_view hypothesis, std::string_view original,
                           Subtype subtype) {
  if (subtype != Subtype::Negative) {
    throw DataError("relaxed_neutral_match applies to negative instances only");
  }
  if (exact_match(hypothesis, original)) return true;
  return exact_match(hypothesis, rewrite_neutral(original).text);
}

std::vector<ErrorLabel> classify_error(std::string_view original, std::string_view reference,
                                       std::string_view hypothesis,
                                       const WordList& gendered_nouns) {
  if (exact_match(hypothesis, reference)) return {};

  bool identity = exact_match(hypothesis, original);
  bool reference_changed = !exact_match(reference, original);
  if (to_lower(normalize_whitespace(hypothesis)) == "none" || (identity && reference_changed)) {
    return {ErrorLabel::NoneResponse};
  }

  std::vector<Token> hyp = tokenize(hypothesis);
  std::vector<Token> ref = tokenize(reference);
  std::vector<Token> orig = tokenize(original);

  std::set<ErrorLabel> labels;
  if (hyp.size() != ref.size()) {
    // Positions cannot be paired; all that can still be recognized is a
    // pure comma difference.
    labels.insert(comma_only_diff(hypothesis, reference) ? ErrorLabel::Comma
                                                         : ErrorLabel::OtherModifications);
    return {labels.begin(), labels.end()};
  }

  bool orig_aligned = orig.size() == hyp.size();
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    const Token& h = hyp[i];
    const Token& r = ref[i];
    if (h.text == r.text) continue;

    if (h.lower == r.lower) {
      // Same word, different punctuation or casing.
      labels.insert(comma_only_diff(h.text, r.text) ? ErrorLabel::Comma
                                                    : ErrorLabel::OtherModifications);
      continue;
    }
    if (h.lower == "themselves" && r.lower == "them") {
      labels.insert(ErrorLabel::ThemToThemselves);
      continue;
    }
    bool both_pronouns = is_pronoun_token(h) && is_pronoun_token(r);
    if (both_pronouns && is_neutral_pronoun(h.lower) && is_neutral_pronoun(r.lower)) {
      labels.insert(ErrorLabel::Pos);
      continue;
    }
    if (!both_pronouns && is_verb_agreement_pair(h.lower, r.lower)) {
      labels.insert(ErrorLabel::Sva);
      continue;
    }

    if (orig_aligned) {
      const Token& o = orig[i];
      if (o.text == r.text) {
        // Changed where the reference kept the original; class by the kept
        // token.
        if (is_pronoun_token(r)) {
          labels.insert(ErrorLabel::ExtraneousPronounChange);
        } else if (is_gendered_noun_token(r.lower, gendered_nouns)) {
          labels.insert(ErrorLabel::ExtraneousNounChange);
        } else if (same_aux_family(h.lower, r.lower)) {
          labels.insert(ErrorLabel::OtherCorrections);
        } else {
          labels.insert(ErrorLabel::OtherModifications);
        }
        continue;
      }
      if (o.text == h.text) {
        // Kept where the reference changed.
        if (is_pronoun_token(o) || is_pronoun_token(r)) {
          labels.insert(ErrorLabel::MissingPronounChange);
        } else if (is_gendered_noun_token(o.lower, gendered_nouns) ||
                   is_gendered_noun_token(r.lower, gendered_nouns)) {
          labels.insert(ErrorLabel::MissingNounChange);
        } else if (same_aux_family(h.lower, r.lower)) {
          labels.insert(ErrorLabel::OtherCorrections);
        } else {
          labels.insert(ErrorLabel::OtherModifications);
        }
        continue;
      }
    }
    labels.insert(same_aux_family(h.lower, r.lower) ? ErrorLabel::OtherCorrections
                                                    : ErrorLabel::OtherModifications);
  }

  if (labels.empty()) {
    // Raw strings differed but every token pair matched: whitespace-only
    // differences land here after normalization catches them above, so
    // anything left is an unmodeled difference.
    labels.insert(ErrorLabel::OtherModifications);
  }
  return {labels.begin(), labels.end()};
}

bool check_variant_consistency(std::string_view feminine, std::string_view masculine,
                               std::string_view neutral, const WordList& gendered_nouns) {
  const std::array<std::pair<std::string_view, std::string_view>, 3> pairs = {{
      {feminine, masculine},
      {feminine, neutral},
      {masculine, neutral},
  }};
  for (const auto& [a_text, b_text] : pairs) {
    std::vector<Token> a = tokenize(a_text);
    std::vector<Token> b = tokenize(b_text);
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].lower == b[i].lower) continue;
      bool gender_related = is_pronoun_token(a[i]) || is_pronoun_token(b[i]) ||
                            is_gendered_noun_token(a[i].lower, gendered_nouns) ||
                            is_gendered_noun_token(b[i].lower, gendered_nouns) ||
                            is_verb_agreement_pair(a[i].lower, b[i].lower);
      if (!gender_related) return false;
    }
  }
  return true;
}

ScoredTuple score_tuple(const TestTuple& tuple, std::string_view hypothesis,
                        const WordList& gendered_nouns) {
  ScoredTuple s;
  s.tuple = tuple;
  s.hypothesis = std::string(hypothesis);
  bool literal_none = to_lower(normalize_whitespace(hypothesis)) == "none";
  s.effective_hypothesis = literal_none ? tuple.original : std::string(hypothesis);
  s.none_output = literal_none || exact_match(hypothesis, tuple.original);
  s.exact = exact_match(s.effective_hypothesis, tuple.reference);
  s.relaxed = s.exact;
  if (!s.exact && tuple.subtype == Subtype::Negative &&
      tuple.requested_gender == Gender::Neutral) {
    s.relaxed = relaxed_neutral_match(s.effective_hypothesis, tuple.original, tuple.subtype);
  }
  s.wer = word_error_rate(s.effective_hypothesis, tuple.reference);
  if (!s.exact) {
    s.errors = classify_error(tuple.original, tuple.reference, s.hypothesis, gendered_nouns);
  }
  return s;
}

EvalReport aggregate(const std::vector<ScoredTuple>& scored) {
  EvalReport report;
  auto add_to = [](CellScore& cell, const ScoredTuple& s) {
    ++cell.n;
    cell.exact_count += s.exact ? 1 : 0;
    cell.relaxed_count += s.relaxed ? 1 : 0;
    cell.none_count += s.none_output ? 1 : 0;
    if (!s.none_output && s.exact) ++cell.non_none_exact_count;
    cell.wer_sum += s.wer;
    cell.bleu_stats.add(s.effective_hypothesis, s.tuple.reference);
    for (ErrorLabel e : s.errors) ++cell.error_counts[e];
  };

  // (language, id) -> exact outcome of the feminine / masculine check.
  std::map<std::pair<std::string, std::string>, std::pair<std::optional<bool>, std::optional<bool>>>
      negative_pairs;

  for (const ScoredTuple& s : scored) {
    const TestTuple& t = s.tuple;
    add_to(report.cells[{t.source_lang, t.subtype, t.original_gender, t.requested_gender}], s);
    if (t.subtype != Subtype::Negative) {
      add_to(report.overall[{t.source_lang, t.original_gender, t.requested_gender}], s);
    } else if (t.requested_gender != Gender::Neutral) {
      auto& entry = negative_pairs[{t.source_lang, t.id}];
      (t.requested_gender == Gender::Feminine ? entry.first : entry.second) = s.exact;
    }
  }

  for (const auto& [key, outcome] : negative_pairs) {
    if (!outcome.first || !outcome.second) continue;  // lone direction, cannot be paired
    NegativeGenderScore& score = report.negative_gender[key.first];
    ++score.instances;
    if (*outcome.first && *outcome.second) ++score.both_match;
  }
  return report;
}

namespace {

using nlohmann::json;

json cell_row(std::string_view language, std::string_view subtype, std::string_view original,
              std::string_view requested, const CellScore& cell) {
  json j;
  j["language"] = std::string(language);
  j["subtype"] = std::string(subtype);
  j["original_gender"] = std::string(original);
  j["requested_gender"] = std::string(requested);
  j["n"] = cell.n;
  j["exact"] = cell.exact_rate();
  j["relaxed"] = cell.relaxed_rate();
  j["bleu"] = cell.bleu();
  j["wer"] = cell.mean_wer();
  j["none_rate"] = cell.none_rate();
  j["non_none_match_rate"] = cell.non_none_match_rate();
  json errors = json::object();
  for (const auto& [label, count] : cell.error_counts) {
    errors[std::string(to_string(label))] = count;
  }
  j["errors"] = errors;
  return j;
}

}  // namespace

void write_report_rows(const EvalReport& report, std::ostream& out) {
  for (const auto& [key, cell] : report.cells) {
    out << cell_row(key.source_lang, to_string(key.subtype), to_string(key.original_gender),
                    to_string(key.requested_gender), cell)
               .dump()
        << '\n';
  }
  for (const auto& [key, cell] : report.overall) {
    out << cell_row(key.source_lang, "overall", to_string(key.original_gender),
                    to_string(key.requested_gender), cell)
               .dump()
        << '\n';
  }
  for (const auto& [language, score] : report.negative_gender) {
    json j;
    j["language"] = language;
    j["subtype"] = "negative";
    j["original_gender"] = "negative";
    j["requested_gender"] = "gender";
    j["n"] = score.instances;
    j["exact"] = score.rate();
    out << j.dump() << '\n';
  }
}

namespace {

std::string fixed(double v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

void render_block(std::ostringstream& out, const std::string& title,
                  const std::vector<std::array<std::string, 5>>& rows) {
  out << title << '\n';
  std::array<std::size_t, 5> widths = {12, 12, 14, 14, 14};
  static const std::array<std::string, 5> header = {"original", "n", "-> feminine",
                                                    "-> masculine", "-> neutral"};
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < 5; ++c) widths[c] = std::max(widths[c], row[c].size() + 2);
  }
  auto emit = [&](const std::array<std::string, 5>& row) {
    out << "  ";
    for (std::size_t c = 0; c < 5; ++c) {
      out << row[c];
      if (c + 1 < 5) out << std::string(widths[c] - row[c].size(), ' ');
    }
    out << '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
}

}  // namespace

std::string render_report(const EvalReport& report) {
  std::set<std::string> languages;
  for (const auto& [key, cell] : report.cells) languages.insert(key.source_lang);

  std::ostringstream out;
  bool first_language = true;
  for (const std::string& language : languages) {
    if (!first_language) out << '\n';
    first_language = false;
    out << "Language: " << language << '\n';

    const std::array<std::pair<Subtype, std::string>, 2> positive_blocks = {{
        {Subtype::PronounOnly, "Pronoun-Only"},
        {Subtype::GenderedNoun, "Gendered-Noun"},
    }};
    const std::array<OriginalGender, 4> positive_rows = {
        OriginalGender::Feminine, OriginalGender::Masculine, OriginalGender::MixedFM,
        OriginalGender::MixedMF};
    const std::array<Gender, 3> columns = {Gender::Feminine, Gender::Masculine, Gender::Neutral};

    auto make_rows = [&](auto cell_of) {
      std::vector<std::array<std::string, 5>> rows;
      for (OriginalGender og : positive_rows) {
        std::array<std::string, 5> row;
        row[0] = std::string(to_string(og));
        std::size_t n = 0;
        bool any = false;
        for (std::size_t c = 0; c < columns.size(); ++c) {
          const CellScore* cell = cell_of(og, columns[c]);
          if (cell) {
            any = true;
            n = std::max(n, cell->n);
            row[2 + c] = fixed(cell->exact_rate());
          } else {
            row[2 + c] = "-";
          }
        }
        row[1] = std::to_string(n);
        if (any) rows.push_back(row);
      }
      return rows;
    };

    for (const auto& [subtype, name] : positive_blocks) {
      auto rows = make_rows([&](OriginalGender og, Gender rg) -> const CellScore* {
        auto it = report.cells.find({language, subtype, og, rg});
        return it == report.cells.end() ? nullptr : &it->second;
      });
      if (!rows.empty()) render_block(out, name, rows);
    }
    {
      auto rows = make_rows([&](OriginalGender og, Gender rg) -> const CellScore* {
        auto it = report.overall.find({language, og, rg});
        return it == report.overall.end() ? nullptr : &it->second;
      });
      if (!rows.empty()) render_block(out, "Overall", rows);
    }

    auto gender_it = report.negative_gender.find(language);
    auto neutral_it =
        report.cells.find({language, Subtype::Negative, OriginalGender::Negative, Gender::Neutral});
    if (gender_it != report.negative_gender.end() || neutral_it != report.cells.end()) {
      out << "Negative\n";
      if (gender_it != report.negative_gender.end()) {
        out << "  gender (both variants unchanged): " << fixed(gender_it->second.rate()) << "  n="
            << gender_it->second.instances << '\n';
      }
      if (neutral_it != report.cells.end()) {
        const CellScore& cell = neutral_it->second;
        out << "  neutral: " << fixed(cell.exact_rate()) << "  relaxed "
            << fixed(cell.relaxed_rate()) << "  n=" << cell.n << "  none-rate "
            << fixed(cell.none_rate()) << "  non-None match " << fixed(cell.non_none_match_rate())
            << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace genvar
