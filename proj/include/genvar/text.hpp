#ifndef GENVAR_TEXT_HPP
#define GENVAR_TEXT_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace genvar {

// One whitespace-delimited token. `text` is the raw slice with punctuation
// attached; `core` has leading/trailing ASCII punctuation stripped and
// `lower` is the lowercased core used for matching. Word-internal
// punctuation (apostrophes, hyphens) stays in the core.
struct Token {
  std::string text;
  std::string core;
  std::string lower;
  std::size_t begin = 0;       // offset of `text` in the sentence
  std::size_t end = 0;
  std::size_t core_begin = 0;  // offset of `core` in the sentence

  bool has_trailing_punct() const { return core_begin + core.size() < end; }
};

std::vector<Token> tokenize(std::string_view sentence);

// Lowercased cores of all tokens, in order.
std::vector<std::string> lower_tokens(std::string_view sentence);

// Raw whitespace-split tokens (punctuation attached), as used by WER and
// the token diffs.
std::vector<std::string> split_tokens(std::string_view sentence);

// Trims and collapses internal whitespace runs to single spaces.
std::string normalize_whitespace(std::string_view s);

// Transfers the casing shape of `pattern` onto `replacement`: all-caps
// stays all-caps, a capitalized first letter stays capitalized, anything
// else is left as given.
std::string apply_case_pattern(std::string_view pattern, std::string_view replacement);

// In-place substitution of token cores. Each patch replaces
// [core_begin, core_begin + old_size) in the original sentence; everything
// else is preserved byte for byte.
struct TextPatch {
  std::size_t begin = 0;
  std::size_t old_size = 0;
  std::string replacement;
};
std::string apply_patches(std::string_view sentence, std::vector<TextPatch> patches);

std::string to_lower(std::string_view s);
bool is_ascii_punct(char c);

}  // namespace genvar

#endif
