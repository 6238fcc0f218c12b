#include <fstream>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "hypoflow/core/config.hpp"
#include "hypoflow/core/roles.hpp"
#include "test_support.hpp"

namespace hypoflow {
namespace {

json all_roles_bound() {
  json models = json::object();
  for (auto role : roles::kAll) models[std::string(role)] = {{"model", "m-" + std::string(role)}, {"temperature", 0.5}};
  return json{{"agent_models", models}};
}

// Rows of the defaults table in docs/config.md: dotted key -> JSON literal.
std::vector<std::pair<std::string, json>> documented_defaults() {
  std::ifstream in(testing::source_dir() / "docs/config.md");
  std::vector<std::pair<std::string, json>> rows;
  std::string line;
  bool in_table = false;
  while (std::getline(in, line)) {
    if (line.rfind("## ", 0) == 0) in_table = line == "## Defaults";
    if (!in_table || line.rfind("| `", 0) != 0) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line.substr(1));
    std::string cell;
    while (std::getline(ss, cell, '|')) cells.push_back(trim(cell));
    auto unquote = [](std::string s) { return s.substr(1, s.size() - 2); };
    rows.emplace_back(unquote(cells.at(0)), json::parse(unquote(cells.at(1))));
  }
  return rows;
}

TEST(Config, FullConfigEchoesValues) {
  auto raw = all_roles_bound();
  raw["n_test"] = 5;
  raw["script_timeout"] = 12.5;
  raw["seed"] = 99;
  raw["compile_report"] = true;
  raw["interpreter_command"] = "python3 -I";
  raw["agent_models"]["Coder_1"]["reasoning_effort"] = "high";
  const auto cfg = validate_config(raw, "/base");
  EXPECT_EQ(cfg.n_test, 5);
  EXPECT_DOUBLE_EQ(cfg.script_timeout, 12.5);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_TRUE(cfg.compile_report);
  EXPECT_EQ(cfg.interpreter_command, "python3 -I");
  EXPECT_EQ(cfg.binding("Refiner_2").model, "m-Refiner_2");
  EXPECT_DOUBLE_EQ(cfg.binding("Refiner_2").temperature, 0.5);
  EXPECT_EQ(cfg.binding("Coder_1").reasoning_effort, "high");
  EXPECT_EQ(cfg.workspace, fs::path("/base/runs"));
}

TEST(Config, MissingRefinerBinding) {
  auto raw = all_roles_bound();
  raw["agent_models"].erase("Refiner_1");
  EXPECT_HF_ERROR(validate_config(raw), ErrorCode::MissingRoleBinding, "Refiner_1");
}

TEST(Config, TemperatureOutOfRange) {
  auto raw = all_roles_bound();
  raw["agent_models"]["Coder_2"]["temperature"] = 2.5;
  EXPECT_HF_ERROR(validate_config(raw), ErrorCode::InvalidTemperature, "2.5");
}

TEST(Config, NonPositiveTimeout) {
  auto raw = all_roles_bound();
  raw["script_timeout"] = 0;
  EXPECT_HF_CODE(validate_config(raw), ErrorCode::NonPositiveTimeout);
}

TEST(Config, BadReasoningEffortAndUnknownRole) {
  auto raw = all_roles_bound();
  raw["agent_models"]["Coder_1"]["reasoning_effort"] = "extreme";
  EXPECT_HF_ERROR(validate_config(raw), ErrorCode::InvalidReasoningEffort, "extreme");
  raw = all_roles_bound();
  raw["agent_models"]["Reviewer_9"] = "m";
  EXPECT_HF_ERROR(validate_config(raw), ErrorCode::InvalidConfig, "agent_models.Reviewer_9");
}

TEST(Config, DefaultTemperaturesFollowRole) {
  const auto cfg = validate_config(json{{"agent_models", {{"*", "some-model"}}}});
  EXPECT_DOUBLE_EQ(cfg.binding("Scientist_1").temperature, 1.0);
  for (auto role : roles::kAll) {
    if (role == roles::kScientist1) continue;
    EXPECT_DOUBLE_EQ(cfg.binding(std::string(role)).temperature, 0.0) << role;
  }
}

TEST(Config, DefaultsMatchDocumentedTable) {
  const auto rows = documented_defaults();
  ASSERT_GE(rows.size(), 15u);
  const auto cfg = config_to_json(validate_config(json{{"agent_models", {{"*", "m"}}}}));
  bool saw_timeout = false;
  for (const auto& [key, expected] : rows) {
    const auto pointer = json::json_pointer("/" + std::regex_replace(key, std::regex("\\."), "/"));
    ASSERT_TRUE(cfg.contains(pointer)) << key;
    EXPECT_EQ(cfg.at(pointer), expected) << key;
    saw_timeout |= key == "script_timeout";
  }
  EXPECT_TRUE(saw_timeout);
}

TEST(Config, RoundTripThroughJson) {
  auto raw = all_roles_bound();
  raw["sandbox"] = {{"toolkit_path", "toolkit"}, {"env_allowlist", {"HOME"}}};
  raw["backend"] = {{"kind", "scripted"}};
  const auto cfg = validate_config(raw, "/base");
  EXPECT_EQ(validate_config(config_to_json(cfg), "/elsewhere"), cfg);
}

TEST(Config, ShippedConfigsLoad) {
  const auto mock = load_config(testing::mock_config_path());
  EXPECT_EQ(mock.backend.kind, BackendKind::Scripted);
  EXPECT_EQ(mock.n_test, 3);
  const auto live = load_config(testing::source_dir() / "configs/live.example.json");
  EXPECT_EQ(live.backend.kind, BackendKind::Live);
}

TEST(Config, MalformedFileNamesPath) {
  testing::TempDir dir;
  testing::spit(dir / "bad.json", "{ not json");
  EXPECT_HF_ERROR(load_config(dir / "bad.json"), ErrorCode::InvalidConfig, (dir / "bad.json").string());
}

}  // namespace
}  // namespace hypoflow
