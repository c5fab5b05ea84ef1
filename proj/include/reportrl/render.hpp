#pragma once

#include <cctype>
#include <span>
#include <string>
#include <string_view>

#include "reportrl/labels.hpp"

namespace reportrl {

// Per-finding assertion actions. The renderer and the labeler agree on the
// semantics: affirm <-> positive, negate <-> negative, hedge <-> uncertain,
// omit <-> blank. That adjunction is what makes reward computation exact.
enum class Action : std::uint8_t { affirm, negate, hedge, omit };
inline constexpr std::size_t kActionCount = 4;
inline constexpr std::array<Action, kActionCount> kAllActions = {
    Action::affirm, Action::negate, Action::hedge, Action::omit};

inline constexpr std::string_view to_string(Action a) {
  switch (a) {
    case Action::affirm: return "affirm";
    case Action::negate: return "negate";
    case Action::hedge: return "hedge";
    case Action::omit: return "omit";
  }
  return "omit";
}

// Output-structure variants the policy can emit.
enum class FormatVariant : std::uint8_t { compliant, empty_think, missing_think, swapped_order };
inline constexpr std::size_t kVariantCount = 4;
inline constexpr std::array<FormatVariant, kVariantCount> kAllVariants = {
    FormatVariant::compliant, FormatVariant::empty_think, FormatVariant::missing_think,
    FormatVariant::swapped_order};

inline constexpr std::string_view to_string(FormatVariant v) {
  switch (v) {
    case FormatVariant::compliant: return "compliant";
    case FormatVariant::empty_think: return "empty_think";
    case FormatVariant::missing_think: return "missing_think";
    case FormatVariant::swapped_order: return "swapped_order";
  }
  return "compliant";
}

inline constexpr Action action_for_state(LabelState s) {
  switch (s) {
    case LabelState::positive: return Action::affirm;
    case LabelState::negative: return Action::negate;
    case LabelState::uncertain: return Action::hedge;
    case LabelState::blank: return Action::omit;
  }
  return Action::omit;
}

inline constexpr LabelState state_for_action(Action a) {
  switch (a) {
    case Action::affirm: return LabelState::positive;
    case Action::negate: return LabelState::negative;
    case Action::hedge: return LabelState::uncertain;
    case Action::omit: return LabelState::blank;
  }
  return LabelState::blank;
}

namespace detail {

inline std::string lowercase_name(std::size_t finding) {
  std::string name(observation_name(finding));
  for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return name;
}

}  // namespace detail

// One sentence per asserted finding; omit renders nothing.
inline std::string finding_sentence(std::size_t finding, Action action) {
  switch (action) {
    case Action::affirm: return "There is " + detail::lowercase_name(finding) + ".";
    case Action::negate: return "No " + detail::lowercase_name(finding) + ".";
    case Action::hedge: return "Possible " + detail::lowercase_name(finding) + ".";
    case Action::omit: return "";
  }
  return "";
}

inline std::string report_body(std::span<const Action> actions) {
  std::string body;
  for (std::size_t f = 0; f < actions.size(); ++f) {
    const std::string sentence = finding_sentence(f, actions[f]);
    if (sentence.empty()) continue;
    if (!body.empty()) body += ' ';
    body += sentence;
  }
  return body;
}

namespace detail {

// Fixed boilerplate think stub; reasoning quality is out of scope, the stub
// only has to be non-empty and deterministic.
inline std::string think_stub(std::span<const Action> actions) {
  std::string names;
  for (std::size_t f = 0; f < actions.size(); ++f) {
    if (actions[f] == Action::omit) continue;
    if (!names.empty()) names += ", ";
    names += lowercase_name(f);
  }
  if (names.empty()) return "Reviewing the study; nothing to assess.";
  return "Reviewing the study for " + names + ".";
}

}  // namespace detail

// Candidate surface form. The variant controls only the tag structure; the
// report body depends only on the actions.
inline std::string render_candidate(std::span<const Action> actions, FormatVariant variant) {
  const std::string body = report_body(actions);
  const std::string think = "<think>" + detail::think_stub(actions) + "</think>";
  const std::string report = "<report>" + body + "</report>";
  switch (variant) {
    case FormatVariant::compliant: return think + "\n" + report;
    case FormatVariant::empty_think: return "<think></think>\n" + report;
    case FormatVariant::missing_think: return report;
    case FormatVariant::swapped_order: return report + "\n" + think;
  }
  return think + "\n" + report;
}

// Reference reports are radiologist-style plain prose: same sentence
// templates, no tag structure. No Finding is derived, never rendered.
inline std::string render_reference(const LabelVector14& truth) {
  std::array<Action, kFindingCount> actions{};
  for (std::size_t f = 0; f < kFindingCount; ++f) {
    actions[f] = action_for_state(truth[f]);
  }
  return report_body(actions);
}

}  // namespace reportrl
