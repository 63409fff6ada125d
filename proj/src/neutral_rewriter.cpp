#include "genvar/neutral_rewriter.hpp"

#include <fstream>
#include <optional>

#include "genvar/errors.hpp"

namespace genvar {

const RewriterLexicon& RewriterLexicon::builtin() {
  static const RewriterLexicon lexicon = [] {
    RewriterLexicon lx;
    lx.function_words = {
        // prepositions
        "about", "above", "across", "after", "against", "along", "among", "around", "at",
        "before", "behind", "below", "beneath", "beside", "between", "beyond", "by", "despite",
        "down", "during", "except", "for", "from", "in", "inside", "into", "near", "of", "off",
        "on", "onto", "out", "outside", "over", "past", "since", "through", "throughout", "to",
        "toward", "towards", "under", "until", "up", "upon", "with", "within", "without",
        // conjunctions and relatives
        "and", "or", "but", "nor", "so", "yet", "because", "although", "though", "while",
        "whereas", "if", "unless", "when", "whenever", "where", "wherever", "that", "than",
        "as", "like",
        // determiners and pronouns
        "the", "a", "an", "this", "these", "those", "my", "your", "our", "its", "some", "any",
        "no", "every", "each", "either", "neither", "all", "both", "few", "many", "much",
        "most", "several", "what", "which", "who", "whom", "whose", "it", "he", "she", "they",
        "we", "you", "i", "me", "us", "them", "him", "her", "his", "hers", "theirs", "mine",
        "yours", "ours",
        // auxiliaries and modals; will/can/may/might/must stay out because
        // they double as nouns ("in his will")
        "is", "are", "was", "were", "be", "been", "being", "am", "do", "does", "did", "done",
        "have", "has", "had", "would", "shall", "should", "could",
        "isn't", "aren't", "wasn't", "weren't", "doesn't", "don't", "didn't",
        "hasn't", "haven't", "hadn't", "won't", "wouldn't", "can't", "cannot", "couldn't",
        "shouldn't", "mustn't",
        // adverbs and particles that cannot open a noun phrase
        "not", "never", "always", "often", "just", "only", "really", "very", "quite", "too",
        "also", "again", "still", "already", "soon", "later", "now", "then", "here", "there",
        "today", "tomorrow", "yesterday", "well", "back", "away", "home", "alone", "instead",
        "anyway", "everywhere", "somewhere", "nowhere", "anywhere", "inside", "outside",
        "upstairs", "downstairs", "abroad", "enough", "indeed", "first", "last", "once",
        "twice", "goodbye", "hello",
    };
    lx.perception_verbs = {
        "see", "sees", "saw", "seen", "seeing", "watch", "watches", "watched", "watching",
        "hear", "hears", "heard", "hearing", "let", "lets", "letting", "notice", "notices",
        "noticed", "noticing", "observe", "observes", "observed", "observing",
    };
    lx.frozen_verbs = {
        // modals and their contractions
        "will", "would", "shall", "should", "can", "could", "may", "might", "must", "ought",
        "won't", "wouldn't", "can't", "cannot", "couldn't", "shouldn't", "mustn't", "shan't",
        "mightn't", "oughtn't",
        // number-invariant auxiliaries
        "had", "did", "hadn't", "didn't",
        // common irregular pasts (regular -ed pasts are caught by suffix)
        "ate", "beat", "became", "began", "bent", "bet", "bit", "blew", "bought", "broke",
        "brought", "built", "burst", "came", "caught", "chose", "cut", "dealt", "drank",
        "drew", "drove", "dug", "fell", "felt", "fled", "flew", "flung", "forbade", "forgave",
        "forgot", "found", "froze", "gave", "got", "grew", "heard", "held", "hid", "hit",
        "hung", "hurt", "kept", "knelt", "knew", "laid", "lay", "led", "left", "lent", "lit",
        "lost", "made", "meant", "met", "paid", "put", "ran", "rang", "read", "rode", "rose",
        "said", "sang", "sank", "sat", "saw", "sent", "set", "shook", "shot", "showed",
        "shrank", "shut", "slept", "sold", "spent", "split", "spoke", "sprang", "spread",
        "stood", "stole", "struck", "stuck", "stung", "swam", "swept", "swore", "swung",
        "taught", "threw", "thought", "told", "took", "tore", "understood", "went", "woke",
        "won", "wore", "wound", "wove", "wrote",
    };
    lx.skip_words = {
        "not", "never", "always", "often", "just", "also", "only", "even", "almost",
        "already", "sometimes", "still", "too", "soon", "then", "indeed", "perhaps", "maybe",
        "surely", "now",
    };
    lx.clause_boundaries = {
        "and", "or", "but", "nor", "so", "yet", "because", "although", "though", "while",
        "whereas", "if", "unless", "until", "since", "when", "whenever", "where", "wherever",
        "that", "who", "whom", "whose", "which", "than", "as", "after", "before",
    };
    return lx;
  }();
  return lexicon;
}

RewriterLexicon RewriterLexicon::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open lexicon file");
  RewriterLexicon lx;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (normalize_whitespace(line).empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(path, lineno, "expected set_name<TAB>word");
    std::string set_name = normalize_whitespace(line.substr(0, tab));
    std::string word = to_lower(normalize_whitespace(line.substr(tab + 1)));
    if (word.empty()) throw ParseError(path, lineno, "empty word");
    if (set_name == "function_words") lx.function_words.insert(word);
    else if (set_name == "perception_verbs") lx.perception_verbs.insert(word);
    else if (set_name == "frozen_verbs") lx.frozen_verbs.insert(word);
    else if (set_name == "skip_words") lx.skip_words.insert(word);
    else if (set_name == "clause_boundaries") lx.clause_boundaries.insert(word);
    else throw ParseError(path, lineno, "unknown word set '" + set_name + "'");
  }
  return lx;
}

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Trailing punctuation that closes a clause (possessives never reach
// across these).
bool has_clause_final_punct(const Token& token) {
  if (!token.has_trailing_punct()) return false;
  for (std::size_t i = token.core_begin - token.begin + token.core.size();
       i < token.text.size(); ++i) {
    switch (token.text[i]) {
      case ',': case ';': case ':': case '.': case '!': case '?': return true;
      default: break;
    }
  }
  return false;
}

std::optional<std::size_t> next_word(const std::vector<Token>& tokens, std::size_t index) {
  for (std::size_t j = index + 1; j < tokens.size(); ++j) {
    if (!tokens[j].core.empty()) return j;
  }
  return std::nullopt;
}

std::optional<std::size_t> prev_word(const std::vector<Token>& tokens, std::size_t index) {
  for (std::size_t j = index; j > 0; --j) {
    if (!tokens[j - 1].core.empty()) return j - 1;
  }
  return std::nullopt;
}

}  // namespace

PronounCategory disambiguate(const std::vector<Token>& tokens, std::size_t index,
                             const RewriterLexicon& lexicon, bool* confident) {
  if (index >= tokens.size()) throw DataError("disambiguate: token index out of range");
  const Token& token = tokens[index];
  auto cells = classify(token.lower);
  if (cells.empty()) throw DataError("disambiguate: '" + token.core + "' is not a pronoun");
  auto decide = [&](PronounCategory c, bool conf) {
    if (confident) *confident = conf;
    return c;
  };
  if (cells.size() == 1) return decide(cells.front().category, true);

  const bool is_her = token.lower == "her";  // else "his"
  const PronounCategory non_determiner =
      is_her ? PronounCategory::Object : PronounCategory::PossessivePronoun;

  // Clause-final use can only be an object or a free-standing possessive:
  // "I like her." / "one of his."
  auto next = next_word(tokens, index);
  if (!next || has_clause_final_punct(token)) return decide(non_determiner, true);

  // A pronoun never follows a possessive determiner: "gave her her umbrella".
  if (!classify(tokens[*next].lower).empty()) return decide(non_determiner, true);

  // Perception and permission verbs take a bare object: "saw her play".
  if (is_her) {
    auto prev = prev_word(tokens, index);
    if (prev && lexicon.perception_verbs.count(tokens[*prev].lower))
      return decide(PronounCategory::Object, true);
  }

  // A function word cannot open the determiner's noun phrase.
  if (lexicon.function_words.count(tokens[*next].lower)) return decide(non_determiner, true);

  // Anything else is treated as the start of a noun phrase.
  return decide(PronounCategory::PossessiveDeterminer, false);
}

PronounCategory disambiguate(std::string_view token, std::string_view left_context,
                             std::string_view right_context, const RewriterLexicon& lexicon,
                             bool* confident) {
  std::string sentence;
  sentence.append(left_context);
  sentence.push_back(' ');
  std::size_t index = tokenize(sentence).size();
  sentence.append(token);
  sentence.push_back(' ');
  sentence.append(right_context);
  return disambiguate(tokenize(sentence), index, lexicon, confident);
}

namespace {

struct Repair {
  std::size_t index;
  std::string after;
};

// Finds the finite verb agreeing with a she/he subject that became they.
// Questions invert ("Is she..."), so the slot just before the subject is
// checked first; otherwise the scan walks forward inside the clause.
std::optional<Repair> find_agreement_repair(const std::vector<Token>& tokens,
                                            std::size_t subject, const RewriterLexicon& lexicon) {
  const AgreementTable& table = AgreementTable::builtin();

  if (auto prev = prev_word(tokens, subject)) {
    if (table.is_irregular_singular(tokens[*prev].lower)) {
      return Repair{*prev,
                    table.convert(tokens[*prev].lower, AgreementDirection::SingularToPlural).text};
    }
  }

  if (has_clause_final_punct(tokens[subject])) return std::nullopt;
  for (std::size_t j = subject + 1; j < tokens.size(); ++j) {
    const Token& t = tokens[j];
    if (t.core.empty()) break;
    const std::string& w = t.lower;
    if (lexicon.clause_boundaries.count(w)) break;
    if (lexicon.frozen_verbs.count(w)) break;
    if (lexicon.skip_words.count(w) || (w.size() > 3 && ends_with(w, "ly"))) {
      if (has_clause_final_punct(t)) break;
      continue;
    }
    if (!classify(w).empty()) {  // a pronoun, e.g. "She herself is..."
      if (has_clause_final_punct(t)) break;
      continue;
    }
    if (w.size() > 3 && ends_with(w, "ed")) break;  // regular past, no repair
    VerbForm converted = table.convert(w, AgreementDirection::SingularToPlural);
    if (converted.known) {
      if (converted.text == w) break;  // already plural-agreeing
      return Repair{j, converted.text};
    }
    if (has_clause_final_punct(t)) break;
  }
  return std::nullopt;
}

}  // namespace

NeutralRewrite rewrite_neutral(std::string_view sentence, const RewriterLexicon& lexicon) {
  std::vector<Token> tokens = tokenize(sentence);
  NeutralRewrite result;
  std::set<std::size_t> edited;

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& token = tokens[i];
    if (token.core.empty()) continue;
    auto cells = classify(token.lower);
    if (cells.empty()) continue;
    bool gendered = false;
    for (const PronounCell& cell : cells) gendered = gendered || cell.gender != Gender::Neutral;
    if (!gendered) continue;

    bool confident = true;
    PronounCategory category = cells.size() == 1
                                   ? cells.front().category
                                   : disambiguate(tokens, i, lexicon, &confident);

    TokenEdit edit;
    edit.token_index = i;
    edit.begin = token.core_begin;
    edit.before = token.core;
    edit.after = apply_case_pattern(token.core, map_pronoun(category, Gender::Neutral));
    edit.kind = EditKind::Pronoun;
    edit.category = category;
    edit.confident = confident;
    result.edits.push_back(edit);
    edited.insert(i);

    if (category == PronounCategory::Subject) {
      if (auto repair = find_agreement_repair(tokens, i, lexicon)) {
        if (!edited.count(repair->index)) {
          const Token& verb = tokens[repair->index];
          TokenEdit verb_edit;
          verb_edit.token_index = repair->index;
          verb_edit.begin = verb.core_begin;
          verb_edit.before = verb.core;
          verb_edit.after = apply_case_pattern(verb.core, repair->after);
          verb_edit.kind = EditKind::Agreement;
          result.edits.push_back(verb_edit);
          edited.insert(repair->index);
        }
      }
    }
  }

  std::vector<TextPatch> patches;
  patches.reserve(result.edits.size());
  for (const TokenEdit& e : result.edits) patches.push_back({e.begin, e.before.size(), e.after});
  result.text = apply_patches(sentence, std::move(patches));
  return result;
}

std::string neutralize(std::string_view sentence) {
  return rewrite_neutral(sentence).text;
}

}  // namespace genvar
