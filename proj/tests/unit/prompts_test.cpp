#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "hypoflow/agents/prompt_template.hpp"
#include "hypoflow/core/roles.hpp"
#include "hypoflow/pipeline/pipeline.hpp"
#include "test_support.hpp"

namespace hypoflow::agents {
namespace {

using Names = std::set<std::string>;

Names operator+(Names a, const Names& b) {
  a.insert(b.begin(), b.end());
  return a;
}

// Bindings each stage supplies, mirrored from the pipeline and documentation
// code paths.
const Names kQuery = {"query", "constraints"};
const Names kPipeline = kQuery + Names{"tools", "n_test"};
const Names kRepair = {"code", "stderr", "failure"};
const Names kRefine = {"idea", "code", "results", "final_results", "notes", "round", "previous_round_dir"};
const Names kDocs = kQuery + Names{"idea"};
const Names kWriter = kDocs + Names{"section", "rounds", "figures", "fit_params"};

Names supplied(const std::string& role, bool repair) {
  if (role == "Scientist_1" || role == "Scientist_2") return kPipeline;
  if (role == "Coder_1") return kPipeline + Names{"idea"};
  if (role == "Coder_2") return kPipeline + Names{"idea", "code"} + (repair ? kRepair : Names{});
  if (role == "Refiner_1") return kPipeline + kRefine;
  if (role == "Refiner_2") return kPipeline + kRefine + (repair ? kRepair : Names{});
  if (role == "Plot_Designer_1") return kDocs + Names{"rounds"};
  if (role == "Plot_Designer_2") return kDocs + Names{"rounds", "code"} + (repair ? kRepair : Names{});
  if (role == "Plot_Analyzer") return kDocs + Names{"figure", "fit_params"};
  return kWriter;
}

TEST(RenderPrompt, Substitutes) {
  EXPECT_EQ(render_prompt(PromptTemplate::parse("Goal: {query}"), {{"query", "X"}}), "Goal: X");
}

TEST(RenderPrompt, MissingBinding) {
  EXPECT_HF_ERROR(render_prompt(PromptTemplate::parse("Tools:\n{tools}\n"), {{"query", "q"}}),
                  ErrorCode::UnboundPlaceholder, "tools");
}

TEST(RenderPrompt, NoPlaceholdersIsIdentity) {
  const std::string body = "Plain text with {\"json\": 1} and { spaced } braces.";
  const auto tpl = PromptTemplate::parse(body);
  EXPECT_TRUE(tpl.required.empty());
  EXPECT_EQ(render_prompt(tpl, {}), body);
}

TEST(RenderPrompt, EscapesExtrasAndSinglePass) {
  const auto tpl = PromptTemplate::parse("{{a}} {a} {b}");
  EXPECT_EQ(tpl.required, (Names{"a", "b"}));
  EXPECT_EQ(render_prompt(tpl, {{"a", "{b}"}, {"b", "B"}, {"unused", "z"}}), "{a} {b} B");
}

TEST(RoleTemplates, ParsesSections) {
  const auto t = parse_role_templates("Coder_2", "version: 7\n[system]\nS\n[prompt]\nP {code}\n[repair]\nR {stderr}\n");
  EXPECT_EQ(t.version, "7");
  EXPECT_EQ(trim(t.system.body), "S");
  EXPECT_EQ(t.prompt.required, Names{"code"});
  ASSERT_TRUE(t.repair);
  EXPECT_EQ(t.repair->required, Names{"stderr"});
  EXPECT_EQ(t.sha256.size(), 64u);
  EXPECT_HF_ERROR(parse_role_templates("X_1", "version: 1\n[system]\nS\n"), ErrorCode::InvalidConfig, "X_1");
}

TEST(Sha256, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ShippedPrompts, EveryRoleLoads) {
  const auto lib = PromptLibrary::load(testing::source_dir() / "prompts");
  for (auto role : roles::kAll) {
    const auto& t = lib.at(role);
    EXPECT_EQ(t.version, "1") << role;
    EXPECT_TRUE(t.system.required.empty()) << role << " system text must be literal";
  }
}

TEST(ShippedPrompts, RequiredPlaceholdersAreSupplied) {
  const auto lib = PromptLibrary::load(testing::source_dir() / "prompts");
  for (auto role_view : roles::kAll) {
    const std::string role(role_view);
    const auto& t = lib.at(role);
    for (const auto& name : t.prompt.required) EXPECT_TRUE(supplied(role, false).count(name)) << role << " {" << name << "}";
    if (!t.repair) continue;
    for (const auto& name : t.repair->required)
      EXPECT_TRUE(supplied(role, true).count(name)) << role << " [repair] {" << name << "}";
  }
}

TEST(ShippedPrompts, ScriptReflectorsCanRepairAndAllReflectorsKnowTheMarker) {
  const auto lib = PromptLibrary::load(testing::source_dir() / "prompts");
  for (const auto* role : {"Coder_2", "Refiner_2", "Plot_Designer_2"}) {
    ASSERT_TRUE(lib.at(role).repair) << role;
    EXPECT_TRUE(lib.at(role).repair->required.count("stderr")) << role;
  }
  for (auto role : roles::kAll) {
    if (!roles::is_reflector(role)) continue;
    EXPECT_NE(lib.at(role).prompt.body.find("APPROVED"), std::string::npos) << role;
  }
  EXPECT_NE(lib.at("Refiner_2").prompt.body.find("NO_FOLLOWUP"), std::string::npos);
}

TEST(ShippedPrompts, ProvenanceCoversEveryRole) {
  const auto lib = PromptLibrary::load(testing::source_dir() / "prompts");
  const auto doc = pipeline::prompt_provenance(lib);
  EXPECT_EQ(doc.at("prompts").size(), roles::kAll.size());
  EXPECT_EQ(doc.at("prompts").at("Coder_1").at("sha256"), lib.at("Coder_1").sha256);
}

TEST(PromptLibrary, MissingFile) {
  testing::TempDir dir;
  EXPECT_HF_CODE(PromptLibrary::load(dir.path()), ErrorCode::InvalidConfig);
}

}  // namespace
}  // namespace hypoflow::agents
