#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hypoflow {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct ModelBinding {
  std::string model;
  double temperature = 0.0;
  std::optional<std::string> reasoning_effort;  // low | medium | high

  bool operator==(const ModelBinding&) const = default;
};

enum class BackendKind { Live, Scripted };

struct BackendSettings {
  BackendKind kind = BackendKind::Live;
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = "OPENAI_API_KEY";
  int max_attempts = 3;
  double initial_backoff = 1.0;   // seconds, doubled per retry
  double request_timeout = 600.0; // seconds

  bool operator==(const BackendSettings&) const = default;
};

enum class IsolationMode { Process, Container };

struct SandboxSettings {
  IsolationMode mode = IsolationMode::Process;
  bool no_network = true;
  bool landlock = true;
  std::uint64_t file_size_limit_mb = 1024;
  std::optional<fs::path> toolkit_path;
  std::vector<std::string> container_prefix;
  double kill_grace = 2.0;  // seconds allowed past the timeout before a run is flagged
  std::vector<std::string> env_allowlist;  // extra variables passed through

  bool operator==(const SandboxSettings&) const = default;
};

struct RunConfig {
  fs::path workspace;
  std::map<std::string, ModelBinding> agent_models;
  int n_test = 3;
  double script_timeout = 600.0;
  std::string interpreter_command = "python3";
  std::uint64_t seed = 0;
  bool compile_report = false;
  std::string latex_command = "pdflatex";
  fs::path prompts_dir;
  fs::path registry_path;
  BackendSettings backend;
  SandboxSettings sandbox;

  const ModelBinding& binding(const std::string& role) const;

  bool operator==(const RunConfig&) const = default;
};

// Directory holding the shipped prompts/ and data/ trees.
fs::path default_data_dir();

// Parses and validates a config document. Relative paths are resolved against
// `base_dir` (normally the directory containing the config file). Absent
// optional fields take the defaults documented in docs/config.md.
RunConfig validate_config(const json& raw, const fs::path& base_dir = fs::current_path());
RunConfig load_config(const fs::path& path);

// Inverse of validate_config: validate_config(config_to_json(c)) == c.
json config_to_json(const RunConfig& config);

}  // namespace hypoflow
