#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include "hypoflow/agents/agent.hpp"
#include "hypoflow/sandbox/runner.hpp"

namespace hypoflow::pipeline {

namespace fs = std::filesystem;

// Moves everything in `dir` except earlier attempt_<n>/ folders into a fresh
// attempt_<n>/ and returns it. No-op (empty path) when `dir` holds nothing
// else.
fs::path archive_attempt(const fs::path& dir);

// Last `max_bytes` of a log file, empty when unreadable.
std::string log_tail(const fs::path& path, std::size_t max_bytes = 4000);

struct ExecutionJob {
  fs::path work_dir;
  sandbox::ScriptSource script;
  sandbox::EnvOverrides env;
  // Called after a zero exit; throws (MissingArtifact, MalformedArtifact, ...)
  // when the outputs are unusable.
  std::function<void(const fs::path&)> verify;
  // Reflector re-invoked with its [repair] template after a failure, on the
  // same partner transcript it reviewed originally.
  const agents::AgentSpec* repairer = nullptr;
  llm::Transcript partner_transcript;
  agents::Bindings bindings;
  int max_repairs = 1;
};

struct ExecutionOutcome {
  sandbox::ExecutionRecord record;
  sandbox::ScriptSource script;  // the script that finally succeeded
  int repairs = 0;
};

// Executes the job's script; on failure archives the attempt, asks the
// repairer for a corrected script (bindings gain {code}, {stderr} and
// {failure}) and retries, at most `max_repairs` times. Throws the last
// failure (ScriptFailed, Timeout or the verifier's error) once repairs are
// exhausted, RepairFailed when the repair reply carries no script, and lets
// SandboxViolation and SpawnFailure through untouched.
ExecutionOutcome execute_with_repair(agents::AgentRunner& agents, sandbox::ScriptRunner& runner, ExecutionJob job);

}  // namespace hypoflow::pipeline
