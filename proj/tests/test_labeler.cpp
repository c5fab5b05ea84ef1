#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cctype>
#include <random>
#include <string>

#include "reportrl/labeler.hpp"
#include "reportrl/render.hpp"

using namespace reportrl;

namespace {

std::size_t observation_index(std::string_view name) {
  for (std::size_t i = 0; i < kObservationCount; ++i) {
    if (observation_name(i) == name) return i;
  }
  FAIL("unknown observation " << name);
  return 0;
}

LabelVector14 random_disease_vector(std::mt19937_64& rng) {
  LabelVector14 labels = all_blank_labels();
  for (std::size_t f = 0; f < kFindingCount; ++f) {
    labels[f] = kAllLabelStates[rng() % 4];
  }
  labels[kNoFindingIndex] = derive_no_finding(labels);
  return labels;
}

}  // namespace

TEST_CASE("split_statements splits on terminators and drops empties") {
  const auto two = split_statements("No pneumothorax. Possible edema.");
  REQUIRE(two.size() == 2);
  REQUIRE(two[0].text == "No pneumothorax");
  REQUIRE(two[1].text == "Possible edema");
  REQUIRE(two[0].sentence_index == 0);
  REQUIRE(two[1].sentence_index == 1);

  REQUIRE(split_statements("").empty());
  REQUIRE(split_statements(" .  . !?").empty());

  const auto newline = split_statements("heart size normal\nno effusion");
  REQUIRE(newline.size() == 2);
  REQUIRE(newline[1].text == "no effusion");
}

TEST_CASE("classify_statement applies negation, hedging and default-positive rules") {
  const Lexicon& lex = default_lexicon();
  const std::size_t effusion = observation_index("Pleural Effusion");
  const std::size_t edema = observation_index("Edema");
  const std::size_t cardiomegaly = observation_index("Cardiomegaly");

  SECTION("negation cue before the trigger") {
    const auto found = classify_statement({"no pleural effusion", 0}, lex);
    REQUIRE(found.size() == 1);
    REQUIRE(found[0].first == effusion);
    REQUIRE(found[0].second == LabelState::negative);
  }
  SECTION("hedging cue anywhere in the statement") {
    const auto found = classify_statement({"possible pulmonary edema", 0}, lex);
    REQUIRE(found.size() == 1);
    REQUIRE(found[0].first == edema);
    REQUIRE(found[0].second == LabelState::uncertain);
  }
  SECTION("bare trigger is positive") {
    const auto found = classify_statement({"cardiomegaly is present", 0}, lex);
    REQUIRE(found.size() == 1);
    REQUIRE(found[0].first == cardiomegaly);
    REQUIRE(found[0].second == LabelState::positive);
  }
  SECTION("negation after the trigger does not negate") {
    const auto found = classify_statement({"edema with no change", 0}, lex);
    REQUIRE(found.size() == 1);
    REQUIRE(found[0].second == LabelState::positive);
  }
  SECTION("cues match on word boundaries, not substrings") {
    // "cannot" contains the letters of "no" but is a hedge, not a negation.
    const auto found = classify_statement({"cannot exclude pneumonia", 0}, lex);
    REQUIRE(found.size() == 1);
    REQUIRE(found[0].second == LabelState::uncertain);
  }
}

TEST_CASE("label_report aggregates statements with positive > uncertain > negative") {
  const std::size_t edema = observation_index("Edema");
  const std::size_t pneumothorax = observation_index("Pneumothorax");

  SECTION("empty report is all blank with No Finding positive") {
    const LabelVector14 labels = label_report("");
    for (std::size_t f = 0; f < kFindingCount; ++f) REQUIRE(labels[f] == LabelState::blank);
    REQUIRE(labels[kNoFindingIndex] == LabelState::positive);
  }
  SECTION("single negated mention") {
    const LabelVector14 labels = label_report("No pneumothorax.");
    REQUIRE(labels[pneumothorax] == LabelState::negative);
    REQUIRE(labels[kNoFindingIndex] == LabelState::positive);
    for (std::size_t f = 0; f < kFindingCount; ++f) {
      if (f != pneumothorax) REQUIRE(labels[f] == LabelState::blank);
    }
  }
  SECTION("positive outranks uncertain across statements") {
    REQUIRE(label_report("Possible edema. Edema is present.")[edema] == LabelState::positive);
    REQUIRE(label_report("Edema is present. Possible edema.")[edema] == LabelState::positive);
  }
  SECTION("uncertain outranks negative") {
    REQUIRE(label_report("No edema. Possible edema.")[edema] == LabelState::uncertain);
  }
}

TEST_CASE("labeling is case-insensitive and deterministic") {
  const std::string text = "POSSIBLE Pleural Effusion.\nNO PNEUMOTHORAX.";
  std::string lowered = text;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  REQUIRE(label_report(text) == label_report(lowered));
  REQUIRE(label_report(text) == label_report(text));
}

TEST_CASE("think-section text is never labeled") {
  const std::size_t edema = observation_index("Edema");
  SECTION("well-formed report section") {
    const LabelVector14 labels =
        label_report("<think>possible edema</think>\n<report>No pneumothorax.</report>");
    REQUIRE(labels[edema] == LabelState::blank);
  }
  SECTION("think section without a report section") {
    const LabelVector14 labels = label_report("<think>possible edema</think>No pneumothorax.");
    REQUIRE(labels[edema] == LabelState::blank);
    REQUIRE(labels[observation_index("Pneumothorax")] == LabelState::negative);
  }
}

// Renderer/labeler adjunction: labeling a rendered report reproduces the
// label vector exactly, including the derived No Finding entry. This is the
// contract that makes every reward in the pipeline exactly computable.
TEST_CASE("render -> label round-trip, exhaustive single-finding cases") {
  for (std::size_t f = 0; f < kFindingCount; ++f) {
    for (LabelState s : {LabelState::positive, LabelState::negative, LabelState::uncertain}) {
      LabelVector14 labels = all_blank_labels();
      labels[f] = s;
      labels[kNoFindingIndex] = derive_no_finding(labels);
      CAPTURE(f, to_string(s));
      REQUIRE(label_report(render_reference(labels)) == labels);
    }
  }
  // ...and the all-blank case, 13*3 + 1 = 40 in total.
  const LabelVector14 blank = all_blank_labels();
  LabelVector14 expected = blank;
  expected[kNoFindingIndex] = LabelState::positive;
  REQUIRE(label_report(render_reference(expected)) == expected);
}

TEST_CASE("render -> label round-trip, 1000 random multi-finding vectors") {
  std::mt19937_64 rng(20240809);
  for (int trial = 0; trial < 1000; ++trial) {
    const LabelVector14 labels = random_disease_vector(rng);
    REQUIRE(label_report(render_reference(labels)) == labels);
  }
}

TEST_CASE("round-trip also holds through the tagged candidate renderer") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const LabelVector14 labels = random_disease_vector(rng);
    std::array<Action, kFindingCount> actions{};
    for (std::size_t f = 0; f < kFindingCount; ++f) actions[f] = action_for_state(labels[f]);
    for (FormatVariant v : kAllVariants) {
      REQUIRE(label_report(render_candidate(actions, v)) == labels);
    }
  }
}

TEST_CASE("lexicon validation rejects duplicate and missing triggers") {
  Lexicon lex = default_lexicon();
  lex.triggers[0].push_back("cardiomegaly");  // already owned by Cardiomegaly
  REQUIRE_THROWS_AS(validate(lex), ConfigError);

  Lexicon empty = default_lexicon();
  empty.triggers[3].clear();
  REQUIRE_THROWS_AS(validate(empty), ConfigError);
}

TEST_CASE("lexicon JSON round-trip preserves the default lexicon") {
  const Lexicon& lex = default_lexicon();
  const Lexicon reloaded = lexicon_from_json(lexicon_to_json(lex));
  REQUIRE(reloaded.triggers == lex.triggers);
  REQUIRE(reloaded.negation_cues == lex.negation_cues);
  REQUIRE(reloaded.hedging_cues == lex.hedging_cues);
}
