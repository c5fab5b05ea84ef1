#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "reportrl/errors.hpp"
#include "reportrl/labels.hpp"

namespace reportrl {

// Finding lexicon for the rule-based labeler. Trigger phrases and cues are
// lowercase token sequences matched on word boundaries. The default lexicon
// ships frozen (data/lexicon.json mirrors default_lexicon()); it is an
// interface contract, not a tunable artifact — reward determinism depends
// on it.
struct Lexicon {
  std::array<std::vector<std::string>, kFindingCount> triggers;
  std::vector<std::string> negation_cues;
  std::vector<std::string> hedging_cues;
};

inline void validate(const Lexicon& lex) {
  std::set<std::string> seen;
  for (std::size_t j = 0; j < kFindingCount; ++j) {
    if (lex.triggers[j].empty()) {
      throw ConfigError("lexicon: no trigger phrase for '" +
                        std::string(observation_name(j)) + "'");
    }
    for (const auto& t : lex.triggers[j]) {
      if (t.empty()) throw ConfigError("lexicon: empty trigger phrase");
      if (!seen.insert(t).second) {
        throw ConfigError("lexicon: trigger '" + t + "' assigned to more than one observation");
      }
    }
  }
}

inline const Lexicon& default_lexicon() {
  static const Lexicon lex = [] {
    Lexicon l;
    l.triggers = {{
        {"enlarged cardiomediastinum", "widened mediastinum"},
        {"cardiomegaly", "enlarged heart"},
        {"lung opacity", "opacity"},
        {"lung lesion", "nodule"},
        {"edema"},
        {"consolidation"},
        {"pneumonia"},
        {"atelectasis"},
        {"pneumothorax"},
        {"pleural effusion", "effusion"},
        {"pleural other", "pleural thickening"},
        {"fracture"},
        {"support devices", "catheter"},
    }};
    l.negation_cues = {"no", "without", "free of", "ruled out", "negative for", "clear of"};
    l.hedging_cues = {"possible",       "possibly", "may represent",  "suspected",
                      "cannot exclude", "likely",   "concerning for", "questionable"};
    validate(l);
    return l;
  }();
  return lex;
}

inline nlohmann::json lexicon_to_json(const Lexicon& lex) {
  nlohmann::json j;
  for (std::size_t i = 0; i < kFindingCount; ++i) {
    j[std::string(observation_name(i))] = lex.triggers[i];
  }
  j["negation_cues"] = lex.negation_cues;
  j["hedging_cues"] = lex.hedging_cues;
  return j;
}

inline Lexicon lexicon_from_json(const nlohmann::json& j) {
  Lexicon lex;
  for (std::size_t i = 0; i < kFindingCount; ++i) {
    const std::string name(observation_name(i));
    if (!j.contains(name)) throw ConfigError("lexicon: missing observation '" + name + "'");
    lex.triggers[i] = j.at(name).get<std::vector<std::string>>();
  }
  lex.negation_cues = j.at("negation_cues").get<std::vector<std::string>>();
  lex.hedging_cues = j.at("hedging_cues").get<std::vector<std::string>>();
  validate(lex);
  return lex;
}

}  // namespace reportrl
