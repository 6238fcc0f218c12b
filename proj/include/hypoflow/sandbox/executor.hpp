#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypoflow/core/config.hpp"
#include "hypoflow/sandbox/script.hpp"

namespace hypoflow::sandbox {

namespace fs = std::filesystem;

// Variables copied from the parent environment when set. Everything else is
// scrubbed.
inline const std::vector<std::string> kDefaultEnvAllowlist = {"PATH", "LANG", "LC_ALL", "LC_CTYPE", "TZ",
                                                              "HYPOFLOW_TOOLKIT_BACKEND"};

inline constexpr const char* kSeedVariable = "HYPOFLOW_RUN_SEED";
inline constexpr const char* kScriptFileName = "script.py";

struct SandboxPolicy {
  std::vector<std::string> interpreter_command{"python3"};
  std::chrono::duration<double> timeout{600.0};
  // A kill that lands later than timeout + kill_grace is logged.
  std::chrono::duration<double> kill_grace{2.0};
  // Extra variables set for the child (run seed, round index, ...).
  std::map<std::string, std::string> env;
  std::vector<std::string> env_allowlist = kDefaultEnvAllowlist;
  bool no_network = true;
  bool landlock = true;
  std::optional<std::uint64_t> file_size_limit_bytes;
  // Directory holding the toolkit's functions.py; prepended to PYTHONPATH.
  std::optional<fs::path> toolkit_path;
  // Non-empty selects container mode: the prefix is prepended to the
  // interpreter command and Landlock is not applied.
  std::vector<std::string> container_prefix;
  // Tree checked for writes outside the working directory. Defaults to the
  // parent of the working directory.
  std::optional<fs::path> watch_root;
};

SandboxPolicy policy_from_config(const RunConfig& config);

// Splits an interpreter command on whitespace.
std::vector<std::string> split_command(const std::string& command);

struct ExecutionRecord {
  int exit_status = 0;
  double wall_time = 0.0;
  fs::path stdout_path;
  fs::path stderr_path;
  bool timed_out = false;
  bool landlock_enforced = false;
};

// Writes script.py into `work_dir` and runs it with the working directory set
// there, a scrubbed environment, resource limits and a wall-clock timeout.
// Logs go to stdout.log / stderr.log. Throws SpawnFailure, or
// SandboxViolation when the script changed anything under the watch root
// outside `work_dir`.
ExecutionRecord execute_script(const ScriptSource& source, const fs::path& work_dir, const SandboxPolicy& policy);

}  // namespace hypoflow::sandbox
