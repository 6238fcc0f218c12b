#include "hypoflow/core/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hypoflow/core/error.hpp"
#include "hypoflow/core/roles.hpp"

#ifndef HYPOFLOW_DATA_DIR
#define HYPOFLOW_DATA_DIR "."
#endif

namespace hypoflow {

namespace {

constexpr const char* kWildcardRole = "*";

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return (base / p).lexically_normal();
}

std::string number_text(double value) {
  std::ostringstream out;
  out << value;
  return out.str();
}

double default_temperature(const std::string& role) {
  // The ideation generator samples at 1; every other agent is greedy.
  return role == roles::kScientist1 ? 1.0 : 0.0;
}

ModelBinding parse_binding(const std::string& role, const json& j) {
  ModelBinding b;
  if (j.is_string()) {
    b.model = j.get<std::string>();
    b.temperature = default_temperature(role);
    return b;
  }
  if (!j.is_object() || !j.contains("model") || !j.at("model").is_string())
    throw Error(ErrorCode::MissingRoleBinding, role, "binding needs a model id");
  b.model = j.at("model").get<std::string>();
  if (b.model.empty()) throw Error(ErrorCode::MissingRoleBinding, role, "empty model id");
  if (j.contains("temperature") && !j.at("temperature").is_null()) {
    if (!j.at("temperature").is_number()) throw Error(ErrorCode::InvalidTemperature, j.at("temperature").dump());
    b.temperature = j.at("temperature").get<double>();
    if (!(b.temperature >= 0.0 && b.temperature <= 2.0))
      throw Error(ErrorCode::InvalidTemperature, number_text(b.temperature), "temperature must lie in [0, 2]");
  } else {
    b.temperature = default_temperature(role);
  }
  if (j.contains("reasoning_effort") && !j.at("reasoning_effort").is_null()) {
    auto effort = j.at("reasoning_effort").get<std::string>();
    if (effort != "low" && effort != "medium" && effort != "high")
      throw Error(ErrorCode::InvalidReasoningEffort, effort, "expected low, medium or high");
    b.reasoning_effort = effort;
  }
  return b;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, key, e.what());
  }
}

BackendSettings parse_backend(const json& j) {
  BackendSettings b;
  if (!j.is_object()) return b;
  auto kind = get_or<std::string>(j, "kind", "live");
  if (kind == "live") {
    b.kind = BackendKind::Live;
  } else if (kind == "scripted") {
    b.kind = BackendKind::Scripted;
  } else {
    throw Error(ErrorCode::InvalidConfig, "backend.kind", "expected live or scripted");
  }
  b.base_url = get_or<std::string>(j, "base_url", b.base_url);
  b.api_key_env = get_or<std::string>(j, "api_key_env", b.api_key_env);
  b.max_attempts = get_or<int>(j, "max_attempts", b.max_attempts);
  b.initial_backoff = get_or<double>(j, "initial_backoff", b.initial_backoff);
  b.request_timeout = get_or<double>(j, "request_timeout", b.request_timeout);
  if (b.max_attempts < 1) throw Error(ErrorCode::InvalidConfig, "backend.max_attempts", "must be >= 1");
  return b;
}

SandboxSettings parse_sandbox(const json& j, const fs::path& base) {
  SandboxSettings s;
  if (!j.is_object()) return s;
  auto mode = get_or<std::string>(j, "mode", "process");
  if (mode == "process") {
    s.mode = IsolationMode::Process;
  } else if (mode == "container") {
    s.mode = IsolationMode::Container;
  } else {
    throw Error(ErrorCode::InvalidConfig, "sandbox.mode", "expected process or container");
  }
  s.no_network = get_or<bool>(j, "no_network", s.no_network);
  s.landlock = get_or<bool>(j, "landlock", s.landlock);
  s.file_size_limit_mb = get_or<std::uint64_t>(j, "file_size_limit_mb", s.file_size_limit_mb);
  if (j.contains("toolkit_path") && !j.at("toolkit_path").is_null())
    s.toolkit_path = resolve(base, j.at("toolkit_path").get<std::string>());
  s.container_prefix = get_or<std::vector<std::string>>(j, "container_prefix", {});
  s.kill_grace = get_or<double>(j, "kill_grace", s.kill_grace);
  s.env_allowlist = get_or<std::vector<std::string>>(j, "env_allowlist", {});
  if (s.mode == IsolationMode::Container && s.container_prefix.empty())
    throw Error(ErrorCode::InvalidConfig, "sandbox.container_prefix", "container mode needs a command prefix");
  return s;
}

}  // namespace

fs::path default_data_dir() {
  if (const char* env = std::getenv("HYPOFLOW_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return HYPOFLOW_DATA_DIR;
}

const ModelBinding& RunConfig::binding(const std::string& role) const {
  auto it = agent_models.find(role);
  if (it == agent_models.end()) throw Error(ErrorCode::MissingRoleBinding, role);
  return it->second;
}

RunConfig validate_config(const json& raw, const fs::path& base_dir) {
  if (!raw.is_object()) throw Error(ErrorCode::InvalidConfig, "", "config must be a JSON object");
  RunConfig cfg;
  cfg.workspace = resolve(base_dir, get_or<std::string>(raw, "workspace", "runs"));
  cfg.n_test = get_or<int>(raw, "n_test", cfg.n_test);
  if (cfg.n_test < 0) throw Error(ErrorCode::InvalidConfig, "n_test", "must be non-negative");
  cfg.script_timeout = get_or<double>(raw, "script_timeout", cfg.script_timeout);
  if (!(cfg.script_timeout > 0.0)) throw Error(ErrorCode::NonPositiveTimeout, number_text(cfg.script_timeout));
  cfg.interpreter_command = get_or<std::string>(raw, "interpreter_command", cfg.interpreter_command);
  if (cfg.interpreter_command.find_first_not_of(" \t") == std::string::npos)
    throw Error(ErrorCode::InvalidConfig, "interpreter_command", "must not be empty");
  cfg.seed = get_or<std::uint64_t>(raw, "seed", cfg.seed);
  cfg.compile_report = get_or<bool>(raw, "compile_report", cfg.compile_report);
  cfg.latex_command = get_or<std::string>(raw, "latex_command", cfg.latex_command);
  cfg.prompts_dir = resolve(base_dir, get_or<std::string>(raw, "prompts_dir", (default_data_dir() / "prompts").string()));
  cfg.registry_path = resolve(
      base_dir, get_or<std::string>(raw, "registry_path", (default_data_dir() / "data" / "tool_registry.json").string()));
  cfg.backend = parse_backend(raw.value("backend", json::object()));
  cfg.sandbox = parse_sandbox(raw.value("sandbox", json::object()), base_dir);

  const json models = raw.value("agent_models", json::object());
  if (!models.is_object()) throw Error(ErrorCode::InvalidConfig, "agent_models", "must be an object");
  for (const auto& [role, value] : models.items()) {
    if (role != kWildcardRole && !roles::is_known(role))
      throw Error(ErrorCode::InvalidConfig, "agent_models." + role, "unknown agent role");
  }
  for (auto role_view : roles::kAll) {
    const std::string role(role_view);
    if (models.contains(role)) {
      cfg.agent_models[role] = parse_binding(role, models.at(role));
    } else if (models.contains(kWildcardRole)) {
      cfg.agent_models[role] = parse_binding(role, models.at(kWildcardRole));
    } else {
      throw Error(ErrorCode::MissingRoleBinding, role);
    }
  }
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, path.string(), "cannot open config file");
  json raw;
  try {
    raw = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string(), e.what());
  }
  return validate_config(raw, fs::absolute(path).parent_path());
}

json config_to_json(const RunConfig& c) {
  json models = json::object();
  for (const auto& [role, b] : c.agent_models) {
    json entry{{"model", b.model}, {"temperature", b.temperature}};
    if (b.reasoning_effort) entry["reasoning_effort"] = *b.reasoning_effort;
    models[role] = entry;
  }
  json sandbox{{"mode", c.sandbox.mode == IsolationMode::Process ? "process" : "container"},
               {"no_network", c.sandbox.no_network},
               {"landlock", c.sandbox.landlock},
               {"file_size_limit_mb", c.sandbox.file_size_limit_mb},
               {"container_prefix", c.sandbox.container_prefix},
               {"kill_grace", c.sandbox.kill_grace},
               {"env_allowlist", c.sandbox.env_allowlist}};
  if (c.sandbox.toolkit_path) sandbox["toolkit_path"] = c.sandbox.toolkit_path->string();
  return json{{"workspace", c.workspace.string()},
              {"agent_models", models},
              {"n_test", c.n_test},
              {"script_timeout", c.script_timeout},
              {"interpreter_command", c.interpreter_command},
              {"seed", c.seed},
              {"compile_report", c.compile_report},
              {"latex_command", c.latex_command},
              {"prompts_dir", c.prompts_dir.string()},
              {"registry_path", c.registry_path.string()},
              {"backend",
               {{"kind", c.backend.kind == BackendKind::Live ? "live" : "scripted"},
                {"base_url", c.backend.base_url},
                {"api_key_env", c.backend.api_key_env},
                {"max_attempts", c.backend.max_attempts},
                {"initial_backoff", c.backend.initial_backoff},
                {"request_timeout", c.backend.request_timeout}}},
              {"sandbox", sandbox}};
}

}  // namespace hypoflow
