#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "reportrl/labels.hpp"
#include "reportrl/lexicon.hpp"
#include "reportrl/sections.hpp"

namespace reportrl {

// Rule-based report labeler. Deterministic: the same text and lexicon always
// produce the same LabelVector14.
//
// Rules:
//   - statements are split on '.', '!', '?' and newlines;
//   - a trigger fires negative when a negation cue starts before it in the
//     same statement, uncertain when a hedging cue occurs anywhere in the
//     statement, positive otherwise;
//   - across statements, positive outranks uncertain outranks negative;
//   - untriggered observations stay blank; No Finding is then derived.

struct Statement {
  std::string text;
  std::size_t sentence_index = 0;
};

inline std::vector<Statement> split_statements(std::string_view report_text) {
  std::vector<Statement> out;
  std::string current;
  auto flush = [&] {
    const auto t = detail::trimmed(current);
    if (!t.empty()) out.push_back({std::string(t), out.size()});
    current.clear();
  };
  for (char c : report_text) {
    if (c == '.' || c == '!' || c == '?' || c == '\n') {
      flush();
    } else {
      current += c;
    }
  }
  flush();
  return out;
}

namespace detail {

inline std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      current += static_cast<char>(std::tolower(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

// First token position where the phrase occurs as a contiguous token run.
inline std::optional<std::size_t> find_phrase(const std::vector<std::string>& tokens,
                                              const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > tokens.size()) return std::nullopt;
  for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < phrase.size(); ++k) {
      if (tokens[i + k] != phrase[k]) {
        match = false;
        break;
      }
    }
    if (match) return i;
  }
  return std::nullopt;
}

inline std::vector<std::string> phrase_tokens(std::string_view phrase) {
  return word_tokens(phrase);
}

}  // namespace detail

inline std::vector<std::pair<std::size_t, LabelState>> classify_statement(
    const Statement& statement, const Lexicon& lex) {
  const auto tokens = detail::word_tokens(statement.text);

  std::optional<std::size_t> first_negation;
  for (const auto& cue : lex.negation_cues) {
    if (auto pos = detail::find_phrase(tokens, detail::phrase_tokens(cue))) {
      if (!first_negation || *pos < *first_negation) first_negation = *pos;
    }
  }
  bool hedged = false;
  for (const auto& cue : lex.hedging_cues) {
    if (detail::find_phrase(tokens, detail::phrase_tokens(cue))) {
      hedged = true;
      break;
    }
  }

  std::vector<std::pair<std::size_t, LabelState>> findings;
  for (std::size_t obs = 0; obs < kFindingCount; ++obs) {
    std::optional<std::size_t> trigger_pos;
    for (const auto& trigger : lex.triggers[obs]) {
      if (auto pos = detail::find_phrase(tokens, detail::phrase_tokens(trigger))) {
        if (!trigger_pos || *pos < *trigger_pos) trigger_pos = *pos;
      }
    }
    if (!trigger_pos) continue;
    LabelState state = LabelState::positive;
    if (first_negation && *first_negation < *trigger_pos) {
      state = LabelState::negative;
    } else if (hedged) {
      state = LabelState::uncertain;
    }
    findings.emplace_back(obs, state);
  }
  return findings;
}

namespace detail {

inline int mention_rank(LabelState s) {
  switch (s) {
    case LabelState::positive: return 3;
    case LabelState::uncertain: return 2;
    case LabelState::negative: return 1;
    case LabelState::blank: return 0;
  }
  return 0;
}

// Drops well-formed think sections; used when no well-formed report section
// exists and the fallback would otherwise label reasoning text.
inline std::string strip_think_sections(std::string_view text) {
  const auto scan = scan_tag(text, "think");
  std::string out;
  std::size_t cursor = 0;
  for (const auto& span : scan.spans) {
    out += text.substr(cursor, span.open_begin - cursor);
    cursor = span.close_end;
  }
  out += text.substr(cursor);
  return out;
}

}  // namespace detail

inline LabelVector14 label_report(std::string_view report_text, const Lexicon& lex) {
  const Sections sections = extract_sections(report_text);
  const std::string body = sections.check.has_report
                               ? sections.report_body
                               : detail::strip_think_sections(report_text);

  LabelVector14 labels = all_blank_labels();
  for (const Statement& statement : split_statements(body)) {
    for (const auto& [obs, state] : classify_statement(statement, lex)) {
      if (detail::mention_rank(state) > detail::mention_rank(labels[obs])) {
        labels[obs] = state;
      }
    }
  }
  labels[kNoFindingIndex] = derive_no_finding(labels);
  return labels;
}

inline LabelVector14 label_report(std::string_view report_text) {
  return label_report(report_text, default_lexicon());
}

}  // namespace reportrl
