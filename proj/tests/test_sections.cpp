#include <catch2/catch_amalgamated.hpp>

#include "reportrl/sections.hpp"

using namespace reportrl;

TEST_CASE("extract_sections on a fully compliant output") {
  const auto s = extract_sections("<think>x</think><report>y</report>");
  REQUIRE(s.check.has_think);
  REQUIRE(s.check.has_report);
  REQUIRE(s.check.ordered);
  REQUIRE(s.check.balanced);
  REQUIRE(s.check.think_nonempty);
  REQUIRE(s.check.report_nonempty);
  REQUIRE(s.check.no_stray_text);
  REQUIRE(s.think_body == "x");
  REQUIRE(s.report_body == "y");
}

TEST_CASE("whitespace between sections is not stray text") {
  const auto s = extract_sections("<think>x</think>\n<report>y</report>\n");
  REQUIRE(s.check.no_stray_text);
}

TEST_CASE("swapped section order clears the ordered flag only") {
  const auto s = extract_sections("<report>y</report><think>x</think>");
  REQUIRE_FALSE(s.check.ordered);
  REQUIRE(s.check.has_think);
  REQUIRE(s.check.has_report);
  REQUIRE(s.check.balanced);
  REQUIRE(s.report_body == "y");
}

TEST_CASE("untagged text falls back to the whole text as report body") {
  const auto s = extract_sections("no tags at all");
  REQUIRE_FALSE(s.check.has_think);
  REQUIRE_FALSE(s.check.has_report);
  REQUIRE(s.report_body == "no tags at all");
  REQUIRE_FALSE(s.check.no_stray_text);
}

TEST_CASE("malformed tags degrade flags without aborting") {
  SECTION("dangling open") {
    const auto s = extract_sections("<think>x<report>y</report>");
    REQUIRE_FALSE(s.check.balanced);
    REQUIRE_FALSE(s.check.has_think);
    REQUIRE(s.check.has_report);
    REQUIRE(s.report_body == "y");
  }
  SECTION("orphan close") {
    const auto s = extract_sections("</report><report>y</report>");
    REQUIRE_FALSE(s.check.balanced);
    REQUIRE(s.check.has_report);
    REQUIRE(s.report_body == "y");
  }
  SECTION("empty string") {
    const auto s = extract_sections("");
    REQUIRE_FALSE(s.check.has_report);
    REQUIRE(s.report_body.empty());
    REQUIRE(s.check.no_stray_text);
  }
}

TEST_CASE("first well-formed report section wins") {
  const auto s = extract_sections("<think>t</think><report>first</report><report>second</report>");
  REQUIRE(s.report_body == "first");
}

TEST_CASE("format_reward tiers") {
  SECTION("full compliance scores 1") {
    REQUIRE(format_reward("<think>x</think>\n<report>y</report>") == 1.0);
  }
  SECTION("empty think is a single minor violation: 0.5") {
    REQUIRE(format_reward("<think></think>\n<report>y</report>") == 0.5);
    REQUIRE(format_reward("<think>  \n</think><report>y</report>") == 0.5);
  }
  SECTION("stray text alone is a single minor violation: 0.5") {
    REQUIRE(format_reward("preamble <think>x</think><report>y</report>") == 0.5);
  }
  SECTION("two minor violations score 0") {
    REQUIRE(format_reward("preamble <think></think><report>y</report>") == 0.0);
  }
  SECTION("structural failures score 0") {
    REQUIRE(format_reward("<report>y</report>") == 0.0);                    // missing think
    REQUIRE(format_reward("<report>y</report><think>x</think>") == 0.0);    // swapped
    REQUIRE(format_reward("<think>x</think><report></report>") == 0.0);     // empty report
    REQUIRE(format_reward("<think>x</think>y") == 0.0);                     // missing report
    REQUIRE(format_reward("plain prose only") == 0.0);
  }
}

TEST_CASE("format_reward is a function of the flags alone") {
  // Two very different texts with identical flag vectors must score the same.
  const std::string a = "<think>alpha</think><report>beta</report>";
  const std::string b = "<think>completely different reasoning</think>\n"
                        "<report>and a different body.</report>\n";
  REQUIRE(format_reward(a) == format_reward(b));
}
