#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "hypoflow/agents/sections.hpp"
#include "test_support.hpp"

namespace hypoflow::agents {
namespace {

// Hand-segmented reply mixing the header styles a model might produce.
const char* kMixedReply = R"(Here is my proposal.

## Idea
Scan peptide length.

**Hypothesis:** Longer sheets resist
unfolding better.

### 3. Mechanism
More hydrogen bonds.

Outcome: A crossover length.
APPROACH:
Design, fold, predict.
## Feasibility
Cheap.
Novelty: Untested.
challenge: Fold bias.
)";

ResearchIdea mixed_expected() {
  ResearchIdea i;
  i.idea = "Scan peptide length.";
  i.hypothesis = "Longer sheets resist\nunfolding better.";
  i.mechanism = "More hydrogen bonds.";
  i.outcome = "A crossover length.";
  i.approach = "Design, fold, predict.";
  i.feasibility = "Cheap.";
  i.novelty = "Untested.";
  i.challenge = "Fold bias.";
  return i;
}

std::vector<std::string> blocks_of(const ResearchIdea& idea) {
  std::vector<std::string> out;
  for (auto name : ResearchIdea::field_names) {
    std::string label(name);
    label[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
    out.push_back(label + ":\n" + idea.field(name) + "\n");
  }
  return out;
}

TEST(ParseIdea, HandSegmentedFixture) { EXPECT_EQ(parse_idea(kMixedReply), mixed_expected()); }

TEST(ParseIdea, ShippedScientistFixture) {
  const auto idea = parse_idea(testing::slurp(testing::source_dir() / "fixtures/example_i/replies/scientist_1.md"));
  EXPECT_EQ(idea.idea.rfind("Compare how the predicted maximal unfolding force", 0), 0u);
  EXPECT_EQ(idea.feasibility,
            "Every step uses one registered tool; a few hundred short sequences fit the\ncompute budget.");
  EXPECT_NE(idea.challenge.find("filtered by measured helix or strand content."), std::string::npos);
  EXPECT_NO_THROW(idea.validate());
}

TEST(ParseIdea, MissingChallenge) {
  auto blocks = blocks_of(mixed_expected());
  blocks.pop_back();
  std::string text;
  for (const auto& b : blocks) text += b;
  EXPECT_HF_ERROR(parse_idea(text), ErrorCode::MissingField, "challenge");
}

TEST(ParseIdea, EmptyBodyIsMissing) {
  auto text = format_idea(mixed_expected());
  text.replace(text.find("Cheap."), 6, "");
  EXPECT_HF_ERROR(parse_idea(text), ErrorCode::MissingField, "feasibility");
}

TEST(ParseIdea, DuplicateHeader) {
  const auto text = format_idea(mixed_expected()) + "\nNovelty: again\n";
  EXPECT_HF_ERROR(parse_idea(text), ErrorCode::DuplicateField, "novelty");
}

TEST(ParseIdea, PermutedHeadersParseTheSame) {
  const auto expected = mixed_expected();
  auto blocks = blocks_of(expected);
  std::mt19937 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::shuffle(blocks.begin(), blocks.end(), rng);
    std::string text;
    for (const auto& b : blocks) text += b + "\n";
    EXPECT_EQ(parse_idea(text), expected);
  }
}

TEST(ParseIdea, HeadersInsideCodeFenceIgnored) {
  const auto text = format_idea(mixed_expected());
  const auto fenced = "Idea: x\n```\nHypothesis: in fence\n```\n";
  EXPECT_HF_CODE(parse_idea(fenced), ErrorCode::MissingField);
  EXPECT_EQ(parse_idea(text), mixed_expected());
}

TEST(ParseIdea, FormatRoundTripProperty) {
  std::mt19937 rng(5);
  const std::string words[] = {"force", "helix", "sheet", "Idea", "length:", "#", "**x**", "42", "note"};
  std::uniform_int_distribution<int> pick(0, 8), count(1, 12);
  for (int trial = 0; trial < 300; ++trial) {
    ResearchIdea idea;
    for (auto name : ResearchIdea::field_names) {
      std::string body = "w";
      for (int n = count(rng); n > 0; --n) body += " " + words[pick(rng)];
      idea.field(name) = body;
    }
    EXPECT_EQ(parse_idea(format_idea(idea)), idea);
  }
}

}  // namespace
}  // namespace hypoflow::agents
