#include "genvar/text.hpp"

#include <algorithm>
#include <cctype>

namespace genvar {

bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

static bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<Token> tokenize(std::string_view sentence) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = sentence.size();
  while (i < n) {
    while (i < n && is_space(sentence[i])) ++i;
    if (i >= n) break;
    std::size_t begin = i;
    while (i < n && !is_space(sentence[i])) ++i;
    Token tok;
    tok.begin = begin;
    tok.end = i;
    tok.text = std::string(sentence.substr(begin, i - begin));

    // Strip punctuation from the edges only; keep it inside the token
    // ("don't", "Umut's"). Non-ASCII bytes never count as punctuation.
    std::size_t cb = 0, ce = tok.text.size();
    while (cb < ce && is_ascii_punct(tok.text[cb])) ++cb;
    while (ce > cb && is_ascii_punct(tok.text[ce - 1])) --ce;
    tok.core = tok.text.substr(cb, ce - cb);
    tok.core_begin = begin + cb;
    tok.lower = to_lower(tok.core);
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

std::vector<std::string> lower_tokens(std::string_view sentence) {
  std::vector<std::string> out;
  for (auto& t : tokenize(sentence)) out.push_back(std::move(t.lower));
  return out;
}

std::vector<std::string> split_tokens(std::string_view sentence) {
  std::vector<std::string> out;
  std::size_t i = 0;
  const std::size_t n = sentence.size();
  while (i < n) {
    while (i < n && is_space(sentence[i])) ++i;
    if (i >= n) break;
    std::size_t begin = i;
    while (i < n && !is_space(sentence[i])) ++i;
    out.emplace_back(sentence.substr(begin, i - begin));
  }
  return out;
}

std::string normalize_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = false;
  for (char c : s) {
    if (is_space(c)) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

std::string apply_case_pattern(std::string_view pattern, std::string_view replacement) {
  auto upper = [](char c) { return static_cast<char>(std::toupper(static_cast<unsigned char>(c))); };
  std::size_t letters = 0, uppers = 0;
  for (char c : pattern) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      ++letters;
      if (std::isupper(static_cast<unsigned char>(c))) ++uppers;
    }
  }
  std::string out(replacement);
  if (letters >= 2 && uppers == letters) {
    std::transform(out.begin(), out.end(), out.begin(), upper);
  } else if (!pattern.empty() && std::isupper(static_cast<unsigned char>(pattern.front()))) {
    if (!out.empty()) out[0] = upper(out[0]);
  }
  return out;
}

std::string apply_patches(std::string_view sentence, std::vector<TextPatch> patches) {
  std::sort(patches.begin(), patches.end(),
            [](const TextPatch& a, const TextPatch& b) { return a.begin > b.begin; });
  std::string out(sentence);
  for (const auto& p : patches) {
    out.replace(p.begin, p.old_size, p.replacement);
  }
  return out;
}

}  // namespace genvar
