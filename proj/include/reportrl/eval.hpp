#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "reportrl/corpus.hpp"
#include "reportrl/grpo.hpp"
#include "reportrl/labeler.hpp"
#include "reportrl/policy.hpp"
#include "reportrl/rewards.hpp"

namespace reportrl {

struct CeCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  std::size_t pairs = 0;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double mean_mccs = 0.0;
  double mean_total_reward = 0.0;  // w_clinical * mccs + w_format * format per study
  double format_rate = 0.0;        // share of outputs with format_reward == 1
  CeCounts counts;
};

// Micro-averaged clinical-efficacy metrics over all 14 labels of all pairs.
// Mentioned-positive binarization (positive or uncertain counts as a
// mention); zero denominators yield zero, and F1 is zero when P + R is.
inline EvalReport ce_metrics(
    const std::vector<std::pair<LabelVector14, LabelVector14>>& pairs) {
  if (pairs.empty()) throw ConfigError("ce_metrics requires a non-empty pair list");
  auto mentioned = [](LabelState s) {
    return s == LabelState::positive || s == LabelState::uncertain;
  };
  EvalReport report;
  report.counts.pairs = pairs.size();
  for (const auto& [generated, reference] : pairs) {
    for (std::size_t i = 0; i < kObservationCount; ++i) {
      const bool g = mentioned(generated[i]);
      const bool r = mentioned(reference[i]);
      report.counts.tp += g && r;
      report.counts.fp += g && !r;
      report.counts.fn += !g && r;
    }
  }
  const auto& c = report.counts;
  report.precision = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
  report.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
  report.f1 = report.precision + report.recall > 0.0
                  ? 2.0 * report.precision * report.recall / (report.precision + report.recall)
                  : 0.0;
  return report;
}

// Deterministic evaluation: per study, observe through a fresh eval-seeded
// channel, greedy-decode, label, and score. Studies are processed in id
// order, so the report does not depend on how the corpus file was ordered.
inline EvalReport evaluate_policy(const PolicyParams& params, const std::vector<Study>& corpus,
                                  const GRPOConfig& cfg, const Lexicon& lex = default_lexicon()) {
  cfg.validate();
  if (corpus.empty()) throw ConfigError("evaluate_policy requires a non-empty corpus");

  std::vector<const Study*> ordered;
  ordered.reserve(corpus.size());
  for (const Study& s : corpus) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(),
            [](const Study* a, const Study* b) { return a->id < b->id; });

  const Margin margin(cfg.margin);
  std::vector<std::pair<LabelVector14, LabelVector14>> pairs;
  pairs.reserve(corpus.size());
  double mccs_sum = 0.0, total_sum = 0.0, format_hits = 0.0;

  for (const Study* study : ordered) {
    const std::uint64_t stream = mix_seed(cfg.seed, mix_seed(0xEBA1ull, fnv1a(study->id)));
    const SignedVector13 signed_truth = to_signed_vector(study->truth);
    const EvidenceVector obs = observe(signed_truth, cfg.noise, mix_seed(stream, 0xB5ull));
    Rng tie_rng(mix_seed(stream, 0xD3ull));
    const Candidate cand = greedy_decode(params, obs, tie_rng);

    const LabelVector14 generated = label_report(cand.text, lex);
    const double mccs_value = mccs(to_signed_vector(generated), signed_truth, margin);
    const double format_value = format_reward(cand.text);
    mccs_sum += mccs_value;
    total_sum += cfg.w_clinical * mccs_value + cfg.w_format * format_value;
    format_hits += format_value == 1.0 ? 1.0 : 0.0;
    pairs.emplace_back(generated, study->truth);
  }

  EvalReport report = ce_metrics(pairs);
  const auto n = static_cast<double>(corpus.size());
  report.mean_mccs = mccs_sum / n;
  report.mean_total_reward = total_sum / n;
  report.format_rate = format_hits / n;
  return report;
}

inline nlohmann::json eval_report_to_json(const EvalReport& report) {
  return nlohmann::json{
      {"precision", report.precision},
      {"recall", report.recall},
      {"f1", report.f1},
      {"mean_mccs", report.mean_mccs},
      {"mean_total_reward", report.mean_total_reward},
      {"format_rate", report.format_rate},
      {"counts",
       {{"pairs", report.counts.pairs},
        {"tp", report.counts.tp},
        {"fp", report.counts.fp},
        {"fn", report.counts.fn}}},
  };
}

}  // namespace reportrl
