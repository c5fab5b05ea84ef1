#pragma once

#include <cmath>
#include <map>
#include <string>

#include "reportrl/errors.hpp"
#include "reportrl/labels.hpp"
#include "reportrl/sections.hpp"
#include "reportrl/text_metrics.hpp"

namespace reportrl {

inline constexpr double kCosineEpsilon = 1e-8;

// Margin for the shaped cosine reward, open interval (-1, 1).
class Margin {
 public:
  explicit Margin(double m) : value_(m) {
    if (!(m > -1.0 && m < 1.0)) {
      throw ConfigError("margin must lie in (-1, 1), got " + std::to_string(m));
    }
  }
  double value() const { return value_; }

 private:
  double value_;
};

// Cosine agreement of two signed label vectors. The epsilon keeps the value
// defined (and ~0) when either vector is all zero.
inline double ccs(const SignedVector13& a, const SignedVector13& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t j = 0; j < kFindingCount; ++j) {
    dot += a[j] * b[j];
    na += a[j] * a[j];
    nb += b[j] * b[j];
  }
  return dot / ((std::sqrt(na) + kCosineEpsilon) * (std::sqrt(nb) + kCosineEpsilon));
}

// Margin-shaped cosine reward: cosine at or below the margin earns zero;
// (margin, 1] is rescaled linearly onto (0, 1].
inline double mccs(const SignedVector13& a, const SignedVector13& b, Margin m) {
  return std::max((ccs(a, b) - m.value()) / (1.0 - m.value()), 0.0);
}

// Report-level F1 over the 14 labels of one pair, with mentioned-positive
// binarization (positive and uncertain both count as a mention).
inline double ce_f1_reward(const LabelVector14& generated, const LabelVector14& reference) {
  auto mentioned = [](LabelState s) {
    return s == LabelState::positive || s == LabelState::uncertain;
  };
  int tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < kObservationCount; ++i) {
    const bool g = mentioned(generated[i]);
    const bool r = mentioned(reference[i]);
    tp += g && r;
    fp += g && !r;
    fn += !g && r;
  }
  const double p = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  const double r = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

struct RewardBreakdown {
  double clinical = 0.0;  // in [0, 1]
  double format = 0.0;    // in {0, 0.5, 1}
  double total = 0.0;     // w_clinical * clinical + w_format * format
  std::map<std::string, double> components;  // auxiliary scores for logging
};

inline RewardBreakdown total_reward(double clinical, double format_score,
                                    double w_clinical = 0.75, double w_format = 0.25) {
  if (w_clinical < 0.0 || w_format < 0.0 ||
      std::abs(w_clinical + w_format - 1.0) > 1e-12) {
    throw ConfigError("reward weights must be nonnegative and sum to 1");
  }
  RewardBreakdown out;
  out.clinical = clinical;
  out.format = format_score;
  out.total = w_clinical * clinical + w_format * format_score;
  return out;
}

}  // namespace reportrl
