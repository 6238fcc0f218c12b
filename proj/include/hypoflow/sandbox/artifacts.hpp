#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypoflow/core/types.hpp"

namespace hypoflow::sandbox {

namespace fs = std::filesystem;
using json = nlohmann::json;

inline constexpr const char* kResultsFile = "results.json";
inline constexpr const char* kFinalResultsFile = "final_results.json";
inline constexpr const char* kNotesFile = "notes.txt";
inline constexpr const char* kToolCallLog = "tool_calls.jsonl";

// Checks results.json, final_results.json and notes.txt in that order.
// Throws MissingArtifact(name) or MalformedArtifact(name).
RoundArtifacts collect_artifacts(const fs::path& round_dir, int round_index = 0);

struct ToolCallLogEntry {
  std::string tool;
  json arguments;
  std::string timestamp;
  std::int64_t sequence = 0;
};

// Entries of <round_dir>/tool_calls.jsonl in file order; empty when the log is
// absent. Throws MalformedArtifact on a bad line or non-increasing sequence
// numbers.
std::vector<ToolCallLogEntry> read_tool_call_log(const fs::path& round_dir);

// Logged tool names that the registry does not declare, in log order.
std::vector<std::string> unregistered_tools(const std::vector<ToolCallLogEntry>& log, const ToolRegistry& registry);

}  // namespace hypoflow::sandbox
