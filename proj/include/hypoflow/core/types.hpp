#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace hypoflow {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string trim(std::string_view text);

struct ResearchQuery {
  std::string text;
  std::vector<std::string> constraints;
  // Maximum number of follow-up rounds after the initial test; absent means
  // "use the config default".
  std::optional<int> n_test;

  // Throws Error(InvalidQuery) when an invariant is broken.
  void validate() const;

  bool operator==(const ResearchQuery&) const = default;
};

void to_json(json& j, const ResearchQuery& q);
void from_json(const json& j, ResearchQuery& q);

// The eight-part research proposal produced by the ideation pair.
struct ResearchIdea {
  std::string idea;
  std::string hypothesis;
  std::string mechanism;
  std::string outcome;
  std::string approach;
  std::string feasibility;
  std::string novelty;
  std::string challenge;

  static constexpr std::array<std::string_view, 8> field_names = {
      "idea", "hypothesis", "mechanism", "outcome", "approach", "feasibility", "novelty", "challenge"};

  std::string& field(std::string_view name);
  const std::string& field(std::string_view name) const;

  // Throws Error(MissingField) for the first empty field.
  void validate() const;

  bool operator==(const ResearchIdea&) const = default;
};

void to_json(json& j, const ResearchIdea& idea);
void from_json(const json& j, ResearchIdea& idea);

struct ToolParameter {
  std::string name;
  std::string type;
  std::string format;

  bool operator==(const ToolParameter&) const = default;
};

struct ToolDescriptor {
  std::string name;
  std::string description;
  std::vector<ToolParameter> inputs;
  std::vector<ToolParameter> outputs;
  std::vector<std::string> notes;

  void validate() const;

  bool operator==(const ToolDescriptor&) const = default;
};

void to_json(json& j, const ToolParameter& p);
void from_json(const json& j, ToolParameter& p);
void to_json(json& j, const ToolDescriptor& t);
void from_json(const json& j, ToolDescriptor& t);

class ToolRegistry {
 public:
  ToolRegistry() = default;
  explicit ToolRegistry(std::vector<ToolDescriptor> tools);

  static ToolRegistry from_json(const json& j);
  static ToolRegistry load(const fs::path& path);
  json to_json() const;

  const std::vector<ToolDescriptor>& tools() const noexcept { return tools_; }
  bool empty() const noexcept { return tools_.empty(); }
  bool contains(std::string_view name) const;

  // Dictionary-style description embedded into coder and ideation prompts.
  std::string render() const;

 private:
  std::vector<ToolDescriptor> tools_;
};

struct RoundArtifacts {
  int round_index = 0;
  fs::path script_path;
  fs::path results_path;
  fs::path final_results_path;
  fs::path notes_path;
  fs::path stdout_log;
  fs::path stderr_log;
  int exit_status = 0;
  double wall_time = 0.0;
};

void to_json(json& j, const RoundArtifacts& r);
void from_json(const json& j, RoundArtifacts& r);

}  // namespace hypoflow
