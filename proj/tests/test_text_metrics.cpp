#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "reportrl/text_metrics.hpp"

using namespace reportrl;
using Catch::Approx;

namespace {

// Brute-force reference implementations, kept structurally different from the
// library path: sorted-vector n-gram multisets and a recursive memoized LCS.

std::vector<std::vector<std::string>> all_ngrams(const std::vector<std::string>& tokens,
                                                 std::size_t n) {
  std::vector<std::vector<std::string>> grams;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    grams.emplace_back(tokens.begin() + i, tokens.begin() + i + n);
  }
  return grams;
}

double oracle_bleu4(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  if (cand.empty()) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto cgrams = all_ngrams(cand, n);
    auto rgrams = all_ngrams(ref, n);
    long matched = 0;
    std::vector<bool> used(rgrams.size(), false);
    for (const auto& g : cgrams) {
      for (std::size_t k = 0; k < rgrams.size(); ++k) {
        if (!used[k] && rgrams[k] == g) {
          used[k] = true;
          ++matched;
          break;
        }
      }
    }
    log_sum += std::log((matched + 1.0) / (static_cast<double>(cgrams.size()) + 1.0));
  }
  const double c = static_cast<double>(cand.size());
  const double r = static_cast<double>(ref.size());
  return (c > r ? 1.0 : std::exp(1.0 - r / c)) * std::exp(log_sum / 4.0);
}

std::size_t lcs_recursive(const std::vector<std::string>& a, const std::vector<std::string>& b,
                          std::size_t i, std::size_t j,
                          std::map<std::pair<std::size_t, std::size_t>, std::size_t>& memo) {
  if (i == 0 || j == 0) return 0;
  const auto key = std::make_pair(i, j);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::size_t result;
  if (a[i - 1] == b[j - 1]) {
    result = lcs_recursive(a, b, i - 1, j - 1, memo) + 1;
  } else {
    result = std::max(lcs_recursive(a, b, i - 1, j, memo), lcs_recursive(a, b, i, j - 1, memo));
  }
  memo[key] = result;
  return result;
}

double oracle_rouge_l(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  if (cand.empty() || ref.empty()) return 0.0;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  const double lcs = static_cast<double>(lcs_recursive(cand, ref, cand.size(), ref.size(), memo));
  if (lcs == 0.0) return 0.0;
  const double p = lcs / static_cast<double>(cand.size());
  const double r = lcs / static_cast<double>(ref.size());
  return 2.0 * p * r / (p + r);
}

std::string random_sentence(std::mt19937_64& rng, std::size_t length, int vocab) {
  std::ostringstream out;
  for (std::size_t i = 0; i < length; ++i) {
    if (i > 0) out << ' ';
    out << "w" << (rng() % vocab);
  }
  return out.str();
}

}  // namespace

TEST_CASE("tokenization lowercases and splits on whitespace") {
  const auto tokens = whitespace_lower_tokens("No  Pleural\tEffusion.\nDone");
  REQUIRE(tokens == std::vector<std::string>{"no", "pleural", "effusion.", "done"});
  REQUIRE(whitespace_lower_tokens("   ").empty());
}

TEST_CASE("identical non-empty strings score 1") {
  REQUIRE(nlg_reward("there is edema. no effusion.", "there is edema. no effusion.") ==
          Approx(1.0).margin(1e-12));
}

TEST_CASE("disjoint strings stay under the smoothing floor") {
  // 32 disjoint tokens per side: the add-one floor is
  // (1/33 * 1/32 * 1/31 * 1/30)^(1/4) ~= 0.0317 with BP = 1, so the reward
  // is ~0.0159 once the zero ROUGE term is averaged in.
  std::ostringstream cand, ref;
  for (int i = 0; i < 32; ++i) {
    cand << (i ? " " : "") << "a" << i;
    ref << (i ? " " : "") << "b" << i;
  }
  const double value = nlg_reward(cand.str(), ref.str());
  REQUIRE(value < 0.02);
  // ROUGE term is exactly zero, so the value is half the smoothed BLEU floor.
  const auto ct = whitespace_lower_tokens(cand.str());
  const auto rt = whitespace_lower_tokens(ref.str());
  REQUIRE(rouge_l_f(ct, rt) == 0.0);
  REQUIRE(value == Approx(0.5 * oracle_bleu4(ct, rt)).margin(1e-12));
}

TEST_CASE("half-of-reference candidate matches the hand-computed value") {
  // Candidate = first 10 tokens of a 20-token reference with distinct tokens:
  // all smoothed precisions are 1, BP = e^(1 - 20/10) = e^-1, and
  // ROUGE-L has P = 1, R = 1/2, F = 2/3.
  std::vector<std::string> ref_tokens, cand_tokens;
  std::ostringstream ref_text, cand_text;
  for (int i = 0; i < 20; ++i) {
    ref_text << (i ? " " : "") << "t" << i;
    if (i < 10) cand_text << (i ? " " : "") << "t" << i;
  }
  const double expected_bleu = std::exp(-1.0);
  const double expected_rouge = 2.0 / 3.0;
  const double value = nlg_reward(cand_text.str(), ref_text.str());
  REQUIRE(value == Approx(0.5 * (expected_bleu + expected_rouge)).margin(1e-12));
  REQUIRE(value == Approx(0.51727305).margin(1e-7));
}

TEST_CASE("library BLEU and ROUGE agree with brute-force oracles on random pairs") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 300; ++trial) {
    const auto cand = whitespace_lower_tokens(random_sentence(rng, 1 + rng() % 14, 8));
    const auto ref = whitespace_lower_tokens(random_sentence(rng, 1 + rng() % 14, 8));
    REQUIRE(bleu4_smoothed(cand, ref) == Approx(oracle_bleu4(cand, ref)).margin(1e-12));
    REQUIRE(rouge_l_f(cand, ref) == Approx(oracle_rouge_l(cand, ref)).margin(1e-12));
  }
}

TEST_CASE("nlg_reward stays in [0, 1] and handles empty sides") {
  REQUIRE(nlg_reward("", "reference text") == 0.0);
  REQUIRE(nlg_reward("candidate text", "") >= 0.0);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const double v = nlg_reward(random_sentence(rng, rng() % 10, 5),
                                random_sentence(rng, rng() % 10, 5));
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 1.0);
  }
}
