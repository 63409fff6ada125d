#ifndef GENVAR_METRICS_HPP
#define GENVAR_METRICS_HPP

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace genvar {

// True iff the two strings are equal after trimming and collapsing
// whitespace runs. No case or punctuation folding: "Ms." and "Mrs." stay
// different.
bool exact_match(std::string_view hypothesis, std::string_view reference);

// Levenshtein distance over token sequences.
std::size_t edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Token-level Levenshtein distance divided by the reference token count.
// Tokens are whitespace-split with punctuation attached. References
// without tokens are rejected.
double word_error_rate(std::string_view hypothesis, std::string_view reference);

// Pooled corpus-level BLEU counts: clipped 1..4-gram matches plus length
// totals, accumulated pair by pair. Scoring uses uniform weights and the
// multiplicative brevity penalty. An n-gram order with zero matches
// contributes (correct+1)/(total+1); an order with no n-grams at all
// (every hypothesis shorter than n) drops out of the geometric mean.
struct BleuStats {
  std::array<std::size_t, 4> correct{};
  std::array<std::size_t, 4> total{};
  std::size_t hypothesis_length = 0;
  std::size_t reference_length = 0;

  void add(std::string_view hypothesis, std::string_view reference);
  double score() const;  // [0, 100]
};

// BLEU over parallel hypothesis/reference lists. The lists must have equal
// length.
double corpus_bleu(const std::vector<std::string>& hypotheses,
                   const std::vector<std::string>& references);

}  // namespace genvar

#endif
