#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "reportrl/errors.hpp"
#include "reportrl/labels.hpp"
#include "reportrl/render.hpp"
#include "reportrl/rng.hpp"

namespace reportrl {

// Tractable stochastic report-generation policy. The generator factorizes
// into one categorical per finding, conditioned on the noisily observed
// evidence for that finding, plus one categorical over format variants.
// Everything downstream of this factorization (log-probabilities, KL,
// gradients) is exact and cheap enough to brute-force in tests.

// Observed evidence per finding: present (+1), absent (-1), unseen (0).
using Evidence = std::int8_t;
using EvidenceVector = std::vector<Evidence>;

inline constexpr std::size_t kEvidenceStates = 3;

inline constexpr std::size_t evidence_row(Evidence e) {
  if (e > 0) return 0;  // present
  if (e < 0) return 1;  // absent
  return 2;             // unseen
}

inline constexpr Evidence evidence_from_row(std::size_t row) {
  return row == 0 ? Evidence{+1} : row == 1 ? Evidence{-1} : Evidence{0};
}

using ActionRow = std::array<double, kActionCount>;
using FindingTable = std::array<ActionRow, kEvidenceStates>;

struct PolicyParams {
  std::vector<FindingTable> content;  // [finding][evidence row][action] logits
  ActionRow format_logits{};          // [variant] logits

  std::size_t findings() const { return content.size(); }
};

// Zero logits = uniform distributions everywhere.
inline PolicyParams uniform_policy(std::size_t findings = kFindingCount) {
  PolicyParams p;
  p.content.assign(findings, FindingTable{});
  return p;
}

struct Candidate {
  std::vector<Action> actions;
  FormatVariant variant = FormatVariant::compliant;
  std::string text;
  double logprob = 0.0;  // under the parameters used at sampling time
};

namespace detail {

inline ActionRow softmax(const ActionRow& logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  ActionRow p{};
  double sum = 0.0;
  for (std::size_t a = 0; a < logits.size(); ++a) {
    p[a] = std::exp(logits[a] - m);
    sum += p[a];
  }
  for (double& v : p) v /= sum;
  return p;
}

inline ActionRow log_softmax(const ActionRow& logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - m);
  const double lse = m + std::log(sum);
  ActionRow out{};
  for (std::size_t a = 0; a < logits.size(); ++a) out[a] = logits[a] - lse;
  return out;
}

inline double categorical_kl(const ActionRow& logits_p, const ActionRow& logits_q) {
  const ActionRow lp = log_softmax(logits_p);
  const ActionRow lq = log_softmax(logits_q);
  double kl = 0.0;
  for (std::size_t a = 0; a < lp.size(); ++a) kl += std::exp(lp[a]) * (lp[a] - lq[a]);
  return kl;
}

inline std::size_t sample_categorical(const ActionRow& probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t a = 0; a + 1 < probs.size(); ++a) {
    acc += probs[a];
    if (u < acc) return a;
  }
  return probs.size() - 1;
}

// Argmax with exact ties broken uniformly at random. Ties only arise for
// untrained or hand-built parameters, but the uniform-init baseline depends
// on them being broken fairly rather than by array order.
inline std::size_t argmax_random_ties(const ActionRow& values, Rng& rng) {
  const double m = *std::max_element(values.begin(), values.end());
  std::array<std::size_t, 4> best{};
  std::size_t n = 0;
  for (std::size_t a = 0; a < values.size(); ++a) {
    if (values[a] == m) best[n++] = a;
  }
  return n == 1 ? best[0] : best[rng.index(n)];
}

}  // namespace detail

// Noisy view of the signed truth: each entry is kept with probability
// 1 - noise_rate and replaced by a uniform draw over the other two values
// otherwise.
inline EvidenceVector observe(std::span<const double> signed_truth, double noise_rate,
                              std::uint64_t seed) {
  if (!(noise_rate >= 0.0 && noise_rate < 1.0)) {
    throw ConfigError("observation noise rate must lie in [0, 1)");
  }
  Rng rng(seed);
  EvidenceVector obs(signed_truth.size());
  for (std::size_t f = 0; f < signed_truth.size(); ++f) {
    const double t = signed_truth[f];
    if (!(t == 1.0 || t == -1.0 || t == 0.0)) {
      throw StructuralError("signed truth entries must be -1, 0 or +1");
    }
    auto value = static_cast<Evidence>(t);
    if (rng.uniform() < noise_rate) {
      static constexpr std::array<Evidence, 3> kValues = {+1, -1, 0};
      std::array<Evidence, 2> others{};
      std::size_t n = 0;
      for (Evidence v : kValues) {
        if (v != value) others[n++] = v;
      }
      value = others[rng.index(2)];
    }
    obs[f] = value;
  }
  return obs;
}

inline EvidenceVector evidence_from_signed(const SignedVector13& signed_truth) {
  EvidenceVector out(kFindingCount);
  for (std::size_t f = 0; f < kFindingCount; ++f) out[f] = static_cast<Evidence>(signed_truth[f]);
  return out;
}

// Action distribution for one finding given its observed evidence.
inline ActionRow policy_distribution(const PolicyParams& params, const EvidenceVector& obs,
                                     std::size_t finding) {
  return detail::softmax(params.content[finding][evidence_row(obs[finding])]);
}

inline ActionRow format_distribution(const PolicyParams& params) {
  return detail::softmax(params.format_logits);
}

inline double candidate_logprob(const PolicyParams& params, const EvidenceVector& obs,
                                std::span<const Action> actions, FormatVariant variant) {
  double lp = 0.0;
  for (std::size_t f = 0; f < params.findings(); ++f) {
    const auto row = detail::log_softmax(params.content[f][evidence_row(obs[f])]);
    lp += row[static_cast<std::size_t>(actions[f])];
  }
  lp += detail::log_softmax(params.format_logits)[static_cast<std::size_t>(variant)];
  return lp;
}

inline Candidate sample_candidate(const PolicyParams& params, const EvidenceVector& obs,
                                  std::uint64_t seed) {
  Rng rng(seed);
  Candidate cand;
  cand.actions.resize(params.findings());
  for (std::size_t f = 0; f < params.findings(); ++f) {
    const ActionRow probs = policy_distribution(params, obs, f);
    cand.actions[f] = static_cast<Action>(detail::sample_categorical(probs, rng));
  }
  cand.variant =
      static_cast<FormatVariant>(detail::sample_categorical(format_distribution(params), rng));
  cand.text = render_candidate(cand.actions, cand.variant);
  cand.logprob = candidate_logprob(params, obs, cand.actions, cand.variant);
  return cand;
}

// Deterministic decode: per-finding and variant argmax, exact ties broken by
// the provided stream.
inline Candidate greedy_decode(const PolicyParams& params, const EvidenceVector& obs, Rng& rng) {
  Candidate cand;
  cand.actions.resize(params.findings());
  for (std::size_t f = 0; f < params.findings(); ++f) {
    cand.actions[f] = static_cast<Action>(
        detail::argmax_random_ties(params.content[f][evidence_row(obs[f])], rng));
  }
  cand.variant =
      static_cast<FormatVariant>(detail::argmax_random_ties(params.format_logits, rng));
  cand.text = render_candidate(cand.actions, cand.variant);
  cand.logprob = candidate_logprob(params, obs, cand.actions, cand.variant);
  return cand;
}

// Exact KL between full candidate distributions, averaged over a batch of
// observations: the sum of per-finding categorical KLs at each observed
// state plus the format-head KL.
inline double policy_kl(const PolicyParams& params_new, const PolicyParams& params_ref,
                        const std::vector<EvidenceVector>& obs_batch) {
  if (obs_batch.empty()) throw ConfigError("policy_kl requires a non-empty observation batch");
  double total = 0.0;
  for (const EvidenceVector& obs : obs_batch) {
    double kl = 0.0;
    for (std::size_t f = 0; f < params_new.findings(); ++f) {
      const std::size_t row = evidence_row(obs[f]);
      kl += detail::categorical_kl(params_new.content[f][row], params_ref.content[f][row]);
    }
    kl += detail::categorical_kl(params_new.format_logits, params_ref.format_logits);
    total += kl;
  }
  return total / static_cast<double>(obs_batch.size());
}

// Exact gradient of candidate_logprob w.r.t. the logits: 1{a = taken} - p(a)
// on touched rows, zero elsewhere. Accumulated into `grad` with a scale so
// callers can build weighted sums without temporaries.
inline void accumulate_logprob_gradient(const PolicyParams& params, const EvidenceVector& obs,
                                        std::span<const Action> actions, FormatVariant variant,
                                        double scale, PolicyParams& grad) {
  for (std::size_t f = 0; f < params.findings(); ++f) {
    const std::size_t row = evidence_row(obs[f]);
    const ActionRow probs = detail::softmax(params.content[f][row]);
    const auto taken = static_cast<std::size_t>(actions[f]);
    for (std::size_t a = 0; a < kActionCount; ++a) {
      grad.content[f][row][a] += scale * ((a == taken ? 1.0 : 0.0) - probs[a]);
    }
  }
  const ActionRow vprobs = format_distribution(params);
  const auto taken = static_cast<std::size_t>(variant);
  for (std::size_t v = 0; v < kVariantCount; ++v) {
    grad.format_logits[v] += scale * ((v == taken ? 1.0 : 0.0) - vprobs[v]);
  }
}

inline PolicyParams logprob_gradient(const PolicyParams& params, const EvidenceVector& obs,
                                     std::span<const Action> actions, FormatVariant variant) {
  PolicyParams grad = uniform_policy(params.findings());
  accumulate_logprob_gradient(params, obs, actions, variant, 1.0, grad);
  return grad;
}

namespace detail {

// d KL(p || q) / d logits_p, accumulated with a scale.
inline void accumulate_kl_row_gradient(const ActionRow& logits_p, const ActionRow& logits_q,
                                       double scale, ActionRow& grad) {
  const ActionRow lp = log_softmax(logits_p);
  const ActionRow lq = log_softmax(logits_q);
  double kl = 0.0;
  for (std::size_t a = 0; a < lp.size(); ++a) kl += std::exp(lp[a]) * (lp[a] - lq[a]);
  for (std::size_t a = 0; a < lp.size(); ++a) {
    grad[a] += scale * std::exp(lp[a]) * ((lp[a] - lq[a]) - kl);
  }
}

}  // namespace detail

inline void accumulate_kl_gradient(const PolicyParams& params_new, const PolicyParams& params_ref,
                                   const std::vector<EvidenceVector>& obs_batch, double scale,
                                   PolicyParams& grad) {
  if (obs_batch.empty()) throw ConfigError("KL gradient requires a non-empty observation batch");
  const double per_obs = scale / static_cast<double>(obs_batch.size());
  for (const EvidenceVector& obs : obs_batch) {
    for (std::size_t f = 0; f < params_new.findings(); ++f) {
      const std::size_t row = evidence_row(obs[f]);
      detail::accumulate_kl_row_gradient(params_new.content[f][row], params_ref.content[f][row],
                                         per_obs, grad.content[f][row]);
    }
    detail::accumulate_kl_row_gradient(params_new.format_logits, params_ref.format_logits, per_obs,
                                       grad.format_logits);
  }
}

inline void axpy(double alpha, const PolicyParams& x, PolicyParams& y) {
  for (std::size_t f = 0; f < y.findings(); ++f) {
    for (std::size_t s = 0; s < kEvidenceStates; ++s) {
      for (std::size_t a = 0; a < kActionCount; ++a) {
        y.content[f][s][a] += alpha * x.content[f][s][a];
      }
    }
  }
  for (std::size_t v = 0; v < kVariantCount; ++v) y.format_logits[v] += alpha * x.format_logits[v];
}

inline double mean_abs_difference(const PolicyParams& a, const PolicyParams& b) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t f = 0; f < a.findings(); ++f) {
    for (std::size_t s = 0; s < kEvidenceStates; ++s) {
      for (std::size_t x = 0; x < kActionCount; ++x) {
        sum += std::abs(a.content[f][s][x] - b.content[f][s][x]);
        ++n;
      }
    }
  }
  for (std::size_t v = 0; v < kVariantCount; ++v) {
    sum += std::abs(a.format_logits[v] - b.format_logits[v]);
    ++n;
  }
  return sum / static_cast<double>(n);
}

// Versioned JSON persistence: {"version":1, "content_logits":[F][3][4],
// "format_logits":[4]}.
inline nlohmann::json params_to_json(const PolicyParams& params) {
  nlohmann::json j;
  j["version"] = 1;
  j["content_logits"] = params.content;
  j["format_logits"] = params.format_logits;
  return j;
}

inline PolicyParams params_from_json(const nlohmann::json& j) {
  if (!j.contains("version") || j.at("version").get<int>() != 1) {
    throw StructuralError("policy params: unsupported or missing version");
  }
  PolicyParams p;
  const auto& content = j.at("content_logits");
  if (!content.is_array() || content.empty()) {
    throw StructuralError("policy params: content_logits must be a non-empty array");
  }
  p.content.resize(content.size());
  for (std::size_t f = 0; f < content.size(); ++f) {
    const auto& table = content.at(f);
    if (table.size() != kEvidenceStates) {
      throw StructuralError("policy params: expected 3 evidence rows per finding");
    }
    for (std::size_t s = 0; s < kEvidenceStates; ++s) {
      const auto& row = table.at(s);
      if (row.size() != kActionCount) {
        throw StructuralError("policy params: expected 4 action logits per row");
      }
      for (std::size_t a = 0; a < kActionCount; ++a) {
        const double v = row.at(a).get<double>();
        if (!std::isfinite(v)) throw StructuralError("policy params: non-finite logit");
        p.content[f][s][a] = v;
      }
    }
  }
  const auto& fmt = j.at("format_logits");
  if (fmt.size() != kVariantCount) {
    throw StructuralError("policy params: expected 4 format logits");
  }
  for (std::size_t v = 0; v < kVariantCount; ++v) {
    const double x = fmt.at(v).get<double>();
    if (!std::isfinite(x)) throw StructuralError("policy params: non-finite logit");
    p.format_logits[v] = x;
  }
  return p;
}

}  // namespace reportrl
