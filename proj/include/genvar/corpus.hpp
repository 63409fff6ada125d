#ifndef GENVAR_CORPUS_HPP
#define GENVAR_CORPUS_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "genvar/gender.hpp"

namespace genvar {

// Annotation labels. An instance may carry several. The source_* /
// source+target_* labels mark people whose gender is already fixed by the
// source sentence; the target_only_* labels mark entities whose gender is
// an artifact of the English translation.
enum class Label {
  TargetOnlyGenderedNoun,
  TargetOnlyGenderedPronoun,
  TargetOnlyGenderedNounPronoun,
  SourceTargetGenderedNoun,
  SourceTargetGenderedNounPronoun,
  SourceGenderedNounTargetPronoun,
  Name,
  NonAgmeName,
  Mixed,
};

std::string_view to_string(Label label);

// Canonical names plus the aliases seen in the wild
// ("source_gendered_pronoun_target_noun", "target_gendered_pronoun_only").
std::optional<Label> label_from_string(std::string_view s);

// True for the three target_only_* labels (the ones that imply an AGME).
bool is_positive_label(Label label);

// True when the label name involves a gendered noun on either side; used
// to split tuples into pronoun-only vs gendered-noun subtypes.
bool mentions_gendered_noun(Label label);

// One corpus entry: a source sentence plus its English translation
// variants. Positive instances carry feminine/masculine (and usually
// neutral) variants; two-AGME instances may add the mixed-gender
// originals; negative instances carry a single invariant translation in
// `original`.
struct Instance {
  std::string id;
  std::string source_lang;  // tr, fa, fi or hu
  std::string source;
  std::optional<std::string> feminine;
  std::optional<std::string> masculine;
  std::optional<std::string> neutral;
  std::optional<std::string> original;  // negatives only
  std::optional<std::string> mixed_fm;  // first entity feminine, second masculine
  std::optional<std::string> mixed_mf;
  std::vector<Label> labels;  // sorted, unique
  int agme_count = 0;

  bool is_negative() const { return agme_count == 0; }
  bool has_label(Label label) const;

  // Throws DataError naming the id and the violated rule.
  void validate() const;

  bool operator==(const Instance&) const = default;
};

// One JSON object per line. Throws ParseError (with line number) on
// malformed input and DataError on invariant violations.
std::vector<Instance> load_corpus(const std::string& path);
std::vector<Instance> load_corpus(std::istream& in, const std::string& name = "<stream>");

void serialize_corpus(const std::vector<Instance>& corpus, std::ostream& out);
void serialize_corpus(const std::vector<Instance>& corpus, const std::string& path);
std::string serialize_instance(const Instance& instance);
Instance parse_instance(const std::string& json_line, const std::string& file = "<string>",
                        std::size_t line = 0);

struct Quantiles {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

struct CorpusStats {
  std::size_t total = 0;
  std::map<Label, std::size_t> label_counts;
  std::map<int, std::size_t> agme_histogram;
  Quantiles source_length;  // whitespace token counts
  Quantiles target_length;
};

CorpusStats compute_stats(const std::vector<Instance>& corpus);

// Linear-interpolation quantile of a sorted sample, p in [0,1].
double quantile(const std::vector<double>& sorted_values, double p);

// Case-insensitive whole-token lexicon of gendered words. Entries are
// normalized like sentence tokens (edge punctuation stripped, lowercased)
// so "Mrs." matches the token "Mrs" and vice versa.
class WordList {
 public:
  static WordList from_file(const std::string& path);  // one token per line, '#' comments

  void add(std::string_view token);
  bool contains(std::string_view token) const;
  std::size_t size() const { return tokens_.size(); }
  const std::set<std::string>& tokens() const { return tokens_; }

 private:
  std::set<std::string> tokens_;
};

// Normalization applied to both word-list entries and sentence tokens.
std::string normalize_word(std::string_view token);

// True iff the English target contains at least one listed word as a
// whole token. The source side is carried for interface symmetry with the
// language filter but is not consulted.
bool word_list_filter(std::string_view source, std::string_view target, const WordList& words);

// Language identification is injected; the library ships no model.
class LanguageIdScorer {
 public:
  virtual ~LanguageIdScorer() = default;
  // Confidence in [0,1] that `text` is written in `lang`. Failures must
  // be thrown, never encoded as a low score.
  virtual double score(std::string_view text, std::string_view lang) const = 0;
};

class ConstantScorer : public LanguageIdScorer {
 public:
  explicit ConstantScorer(double value) : value_(value) {}
  double score(std::string_view, std::string_view) const override { return value_; }

 private:
  double value_;
};

// True iff score >= threshold (boundary inclusive). Scorer exceptions
// propagate; an out-of-range score is a DataError.
bool language_id_filter(std::string_view source, std::string_view lang,
                        const LanguageIdScorer& scorer, double threshold = 0.7);

}  // namespace genvar

#endif
