#include "hypoflow/sandbox/artifacts.hpp"

#include <fstream>

#include "hypoflow/core/error.hpp"
#include "hypoflow/sandbox/executor.hpp"

namespace hypoflow::sandbox {

namespace {

void require_json(const fs::path& path, const char* name) {
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::MissingArtifact, name);
  std::ifstream in(path, std::ios::binary);
  try {
    [[maybe_unused]] const auto doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedArtifact, name, e.what());
  }
}

}  // namespace

RoundArtifacts collect_artifacts(const fs::path& round_dir, int round_index) {
  RoundArtifacts r;
  r.round_index = round_index;
  r.script_path = round_dir / kScriptFileName;
  r.results_path = round_dir / kResultsFile;
  r.final_results_path = round_dir / kFinalResultsFile;
  r.notes_path = round_dir / kNotesFile;
  r.stdout_log = round_dir / "stdout.log";
  r.stderr_log = round_dir / "stderr.log";

  require_json(r.results_path, kResultsFile);
  require_json(r.final_results_path, kFinalResultsFile);
  if (!fs::is_regular_file(r.notes_path)) throw Error(ErrorCode::MissingArtifact, kNotesFile);
  return r;
}

std::vector<ToolCallLogEntry> read_tool_call_log(const fs::path& round_dir) {
  std::vector<ToolCallLogEntry> out;
  std::ifstream in(round_dir / kToolCallLog);
  if (!in) return out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ToolCallLogEntry e;
    try {
      const auto j = json::parse(line);
      e.tool = j.at("tool").get<std::string>();
      e.arguments = j.value("arguments", json::object());
      e.timestamp = j.value("timestamp", "");
      e.sequence = j.at("sequence").get<std::int64_t>();
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::MalformedArtifact, kToolCallLog, "line " + std::to_string(line_no) + ": " + ex.what());
    }
    if (!out.empty() && e.sequence <= out.back().sequence)
      throw Error(ErrorCode::MalformedArtifact, kToolCallLog,
                  "line " + std::to_string(line_no) + ": sequence numbers must increase");
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<std::string> unregistered_tools(const std::vector<ToolCallLogEntry>& log, const ToolRegistry& registry) {
  std::vector<std::string> out;
  for (const auto& e : log)
    if (!registry.contains(e.tool)) out.push_back(e.tool);
  return out;
}

}  // namespace hypoflow::sandbox
