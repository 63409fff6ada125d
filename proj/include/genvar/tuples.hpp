#ifndef GENVAR_TUPLES_HPP
#define GENVAR_TUPLES_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "genvar/corpus.hpp"
#include "genvar/gender.hpp"

namespace genvar {

// Gender composition of the translation a rewriter starts from. Mixed
// compositions only occur for two-AGME instances; Negative originals have
// no AGME at all.
enum class OriginalGender { Feminine, Masculine, MixedFM, MixedMF, Negative };

enum class Subtype { PronounOnly, GenderedNoun, Negative };

std::string_view to_string(OriginalGender g);
std::string_view to_string(Subtype s);
std::optional<OriginalGender> original_gender_from_string(std::string_view s);
std::optional<Subtype> subtype_from_string(std::string_view s);

// One evaluation item: rewrite `original` so every AGME carries
// `requested_gender`, then compare against `reference`. Negative tuples
// keep reference == original (the rewriter must leave them alone).
struct TestTuple {
  std::string id;
  std::string source_lang;
  std::string source;
  std::string original;
  OriginalGender original_gender = OriginalGender::Feminine;
  Gender requested_gender = Gender::Neutral;
  std::string reference;
  Subtype subtype = Subtype::PronounOnly;

  bool operator==(const TestTuple&) const = default;
};

// Negative when the instance has no AGME; PronounOnly when the labels
// include target_only_gendered_pronoun and nothing involving a gendered
// noun; GenderedNoun otherwise.
Subtype mark_subtype(const Instance& instance);

// Expands one instance into its test tuples:
//   1 AGME  -> f->m, f->n, m->f, m->n (neutral targets dropped when the
//              instance has no neutral reference)
//   2 AGMEs -> the four uniform tuples plus fm/mf originals against the
//              f+f, m+m and n+n references
//   0 AGMEs -> three check tuples (requested f/m/n, reference = original)
//   3+      -> none
// A two-AGME instance without mixed_fm/mixed_mf slots loses those tuples;
// a note is appended to `warnings` when given.
std::vector<TestTuple> extract(const Instance& instance,
                               std::vector<std::string>* warnings = nullptr);

struct ExtractionResult {
  std::vector<TestTuple> tuples;  // corpus order
  std::vector<std::string> warnings;
};

ExtractionResult extract_corpus(const std::vector<Instance>& corpus);

struct TupleGroupKey {
  std::string source_lang;
  Subtype subtype = Subtype::PronounOnly;
  OriginalGender original_gender = OriginalGender::Feminine;

  auto operator<=>(const TupleGroupKey&) const = default;
};

std::map<TupleGroupKey, std::size_t> group_counts(const std::vector<TestTuple>& tuples);

// Count-by-category rows matching the published table layout. Uniform rows
// count one per f/m direction pair (the f->m tuple count, which pairing
// makes equal to the m->f count); mixed rows count distinct mixed
// originals (up to two per instance); negative rows count instances (each
// has three check tuples).
struct CategoryKey {
  std::string source_lang;
  Subtype subtype = Subtype::PronounOnly;
  bool mixed_original = false;

  auto operator<=>(const CategoryKey&) const = default;
};

std::map<CategoryKey, std::size_t> category_summary(const std::vector<TestTuple>& tuples);

// One JSON object per line, all TestTuple fields.
void write_tuples(const std::vector<TestTuple>& tuples, std::ostream& out);
void write_tuples(const std::vector<TestTuple>& tuples, const std::string& path);
std::vector<TestTuple> load_tuples(const std::string& path);
std::vector<TestTuple> load_tuples(std::istream& in, const std::string& name = "<stream>");

}  // namespace genvar

#endif
