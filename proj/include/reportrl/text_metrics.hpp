#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace reportrl {

// Lexical overlap metrics for the NLG reward arm. Tokenization is lowercase
// whitespace splitting; punctuation stays attached to its word.

inline std::vector<std::string> whitespace_lower_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!current.empty()) {
        tokens.push_back(current);
        current.clear();
      }
    } else {
      current += static_cast<char>(std::tolower(c));
    }
  }
  if (!current.empty()) tokens.push_back(current);
  return tokens;
}

namespace detail {

inline std::unordered_map<std::string, int> ngram_counts(const std::vector<std::string>& tokens,
                                                         std::size_t n) {
  std::unordered_map<std::string, int> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (std::size_t k = 0; k < n; ++k) {
      key += tokens[i + k];
      key += '\x1f';
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace detail

// BLEU-4 with add-one smoothing on every n-gram precision and the standard
// brevity penalty. Empty candidates score 0.
inline double bleu4_smoothed(const std::vector<std::string>& candidate,
                             const std::vector<std::string>& reference) {
  if (candidate.empty()) return 0.0;
  double log_precision_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto cand = detail::ngram_counts(candidate, n);
    const auto ref = detail::ngram_counts(reference, n);
    long total = 0;
    long matched = 0;
    for (const auto& [gram, count] : cand) {
      total += count;
      const auto it = ref.find(gram);
      if (it != ref.end()) matched += std::min(count, it->second);
    }
    log_precision_sum += std::log((static_cast<double>(matched) + 1.0) /
                                  (static_cast<double>(total) + 1.0));
  }
  const auto c = static_cast<double>(candidate.size());
  const auto r = static_cast<double>(reference.size());
  const double brevity = c > r ? 1.0 : std::exp(1.0 - r / std::max(c, 1.0));
  return brevity * std::exp(log_precision_sum / 4.0);
}

// ROUGE-L F-measure (beta = 1) from the token-level longest common subsequence.
inline double rouge_l_f(const std::vector<std::string>& candidate,
                        const std::vector<std::string>& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  const std::size_t m = candidate.size();
  const std::size_t n = reference.size();
  std::vector<std::size_t> prev(n + 1, 0), curr(n + 1, 0);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      curr[j] = candidate[i - 1] == reference[j - 1] ? prev[j - 1] + 1
                                                     : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  const auto lcs = static_cast<double>(prev[n]);
  if (lcs == 0.0) return 0.0;
  const double p = lcs / static_cast<double>(m);
  const double r = lcs / static_cast<double>(n);
  return 2.0 * p * r / (p + r);
}

// Mean of smoothed BLEU-4 and ROUGE-L over the report bodies.
inline double nlg_reward(std::string_view candidate_body, std::string_view reference_body) {
  const auto cand = whitespace_lower_tokens(candidate_body);
  const auto ref = whitespace_lower_tokens(reference_body);
  return 0.5 * (bleu4_smoothed(cand, ref) + rouge_l_f(cand, ref));
}

}  // namespace reportrl
