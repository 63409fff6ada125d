#include "genvar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "genvar/errors.hpp"
#include "genvar/text.hpp"

namespace genvar {

bool exact_match(std::string_view hypothesis, std::string_view reference) {
  return normalize_whitespace(hypothesis) == normalize_whitespace(reference);
}

std::size_t edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  // Single-row Levenshtein.
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t next = std::min({row[j] + 1, row[j - 1] + 1,
                                   diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = row[j];
      row[j] = next;
    }
  }
  return row[b.size()];
}

double word_error_rate(std::string_view hypothesis, std::string_view reference) {
  std::vector<std::string> hyp = split_tokens(hypothesis);
  std::vector<std::string> ref = split_tokens(reference);
  if (ref.empty()) throw DataError("word_error_rate: reference has no tokens");
  return static_cast<double>(edit_distance(hyp, ref)) / static_cast<double>(ref.size());
}

namespace {

// n-gram multiset keyed by tokens joined on an unlikely separator.
std::unordered_map<std::string, std::size_t> ngram_counts(const std::vector<std::string>& tokens,
                                                          std::size_t n) {
  std::unordered_map<std::string, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (std::size_t k = 0; k < n; ++k) {
      if (k) key.push_back('\x1f');
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

void BleuStats::add(std::string_view hypothesis, std::string_view reference) {
  std::vector<std::string> hyp = split_tokens(hypothesis);
  std::vector<std::string> ref = split_tokens(reference);
  hypothesis_length += hyp.size();
  reference_length += ref.size();
  for (std::size_t n = 1; n <= 4; ++n) {
    if (hyp.size() < n) continue;
    total[n - 1] += hyp.size() - n + 1;
    auto href = ngram_counts(ref, n);
    for (const auto& [gram, count] : ngram_counts(hyp, n)) {
      auto it = href.find(gram);
      if (it != href.end()) correct[n - 1] += std::min(count, it->second);
    }
  }
}

double BleuStats::score() const {
  if (hypothesis_length == 0) return 0.0;
  double log_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 0; n < 4; ++n) {
    if (total[n] == 0) continue;
    double p = correct[n] > 0
                   ? static_cast<double>(correct[n]) / static_cast<double>(total[n])
                   : static_cast<double>(correct[n] + 1) / static_cast<double>(total[n] + 1);
    log_sum += std::log(p);
    ++orders;
  }
  if (orders == 0) return 0.0;
  double geometric_mean = std::exp(log_sum / static_cast<double>(orders));
  double brevity = hypothesis_length >= reference_length
                       ? 1.0
                       : std::exp(1.0 - static_cast<double>(reference_length) /
                                            static_cast<double>(hypothesis_length));
  return 100.0 * brevity * geometric_mean;
}

double corpus_bleu(const std::vector<std::string>& hypotheses,
                   const std::vector<std::string>& references) {
  if (hypotheses.size() != references.size()) {
    throw DataError("corpus_bleu: " + std::to_string(hypotheses.size()) + " hypotheses vs " +
                    std::to_string(references.size()) + " references");
  }
  BleuStats stats;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) stats.add(hypotheses[i], references[i]);
  return stats.score();
}

}  // namespace genvar
