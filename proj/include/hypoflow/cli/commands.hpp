#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace hypoflow::cli {

namespace fs = std::filesystem;

inline constexpr int kExitDone = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitInvalid = 2;

struct CommandOptions {
  bool json = false;
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> workspace;
  std::optional<std::string> run_id;
  std::ostream* out = &std::cout;
};

// Validates config, query, prompts and registry without running anything.
int cmd_validate(const fs::path& config_path, const std::optional<fs::path>& query_path, const CommandOptions& opts);

// Full pipeline against the live backend.
int cmd_run(const fs::path& config_path, const fs::path& query_path, const CommandOptions& opts);

// Same pipeline against the scripted backend, offline and with strict
// continuity and registry checks.
int cmd_mock_run(const fs::path& config_path, const fs::path& query_path, const fs::path& fixtures_path,
                 const CommandOptions& opts);

// Continues a run from its first incomplete stage. Uses the scripted backend
// when `fixtures_path` is given, the live one otherwise.
int cmd_resume(const fs::path& run_dir, const std::optional<fs::path>& fixtures_path, const CommandOptions& opts);

// Read-only summary of a run directory.
int cmd_inspect(const fs::path& run_dir, const CommandOptions& opts);

}  // namespace hypoflow::cli
