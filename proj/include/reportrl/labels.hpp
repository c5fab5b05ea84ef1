#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

#include "reportrl/errors.hpp"

namespace reportrl {

// The 14-observation chest X-ray label space, in the canonical CheXbert
// order. Index 13 ("No Finding") is the catch-all label; indices 0..12 are
// the disease-specific categories. Every other module indexes through this
// table; nothing else may define its own observation order.
inline constexpr std::size_t kObservationCount = 14;
inline constexpr std::size_t kFindingCount = 13;  // disease categories, No Finding excluded
inline constexpr std::size_t kNoFindingIndex = 13;

inline constexpr std::array<std::string_view, kObservationCount> kObservationNames = {
    "Enlarged Cardiomediastinum",
    "Cardiomegaly",
    "Lung Opacity",
    "Lung Lesion",
    "Edema",
    "Consolidation",
    "Pneumonia",
    "Atelectasis",
    "Pneumothorax",
    "Pleural Effusion",
    "Pleural Other",
    "Fracture",
    "Support Devices",
    "No Finding",
};

inline constexpr std::string_view observation_name(std::size_t index) {
  return kObservationNames[index];
}

enum class LabelState : std::uint8_t { positive, negative, uncertain, blank };

inline constexpr std::array<LabelState, 4> kAllLabelStates = {
    LabelState::positive, LabelState::negative, LabelState::uncertain, LabelState::blank};

inline constexpr std::string_view to_string(LabelState s) {
  switch (s) {
    case LabelState::positive: return "positive";
    case LabelState::negative: return "negative";
    case LabelState::uncertain: return "uncertain";
    case LabelState::blank: return "blank";
  }
  return "blank";
}

inline LabelState label_state_from_string(std::string_view s) {
  for (LabelState state : kAllLabelStates) {
    if (to_string(state) == s) return state;
  }
  throw StructuralError("unknown label state: '" + std::string(s) + "'");
}

using LabelVector14 = std::array<LabelState, kObservationCount>;
using SignedVector13 = std::array<double, kFindingCount>;

inline constexpr LabelVector14 all_blank_labels() {
  LabelVector14 v{};
  v.fill(LabelState::blank);
  return v;
}

// Signed scalar embedding of a label state. Uncertain maps to +1: a hedged
// mention is treated as actionable suspicion, not as absence.
inline constexpr int signed_value(LabelState s) {
  switch (s) {
    case LabelState::positive: return +1;
    case LabelState::negative: return -1;
    case LabelState::uncertain: return +1;
    case LabelState::blank: return 0;
  }
  return 0;
}

// Signed vector over the 13 disease categories. The No Finding entry is
// dropped: it is complementary to the rest and would inflate agreement.
inline SignedVector13 to_signed_vector(const LabelVector14& labels) {
  SignedVector13 out{};
  for (std::size_t j = 0; j < kFindingCount; ++j) {
    out[j] = static_cast<double>(signed_value(labels[j]));
  }
  return out;
}

// No Finding is positive exactly when every disease label is blank or
// explicitly negative. An uncertain entry is a suspected finding and
// cancels No Finding just like a positive one.
inline LabelState derive_no_finding(std::span<const LabelState, kFindingCount> disease_states) {
  for (LabelState s : disease_states) {
    if (s == LabelState::positive || s == LabelState::uncertain) return LabelState::blank;
  }
  return LabelState::positive;
}

inline LabelState derive_no_finding(const LabelVector14& labels) {
  return derive_no_finding(std::span<const LabelState, kFindingCount>(labels.data(), kFindingCount));
}

}  // namespace reportrl
