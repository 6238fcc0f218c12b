#include "hypoflow/sandbox/executor.hpp"

#include <stdlib.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "hypoflow/core/error.hpp"
#include "hypoflow/core/run_store.hpp"
#include "hypoflow/sandbox/landlock.hpp"
#include "hypoflow/sandbox/process.hpp"

namespace hypoflow::sandbox {

namespace {

// Loaded by the interpreter at startup when the kernel cannot deny network
// access itself.
constexpr const char* kNetworkGuard = R"(import socket as _socket

def _denied(*_args, **_kwargs):
    raise PermissionError("network access denied by sandbox policy")

_socket.socket.connect = _denied
_socket.socket.connect_ex = _denied
_socket.socket.bind = _denied
_socket.create_connection = _denied
_socket.getaddrinfo = _denied
)";

class ScratchDir {
 public:
  ScratchDir() {
    auto pattern = (fs::temp_directory_path() / "hypoflow-scratch-XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) throw Error(ErrorCode::SpawnFailure, "", "cannot create scratch dir");
    path_ = pattern;
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

struct EntryState {
  fs::file_type type;
  std::uintmax_t size;
  fs::file_time_type mtime;
  bool operator==(const EntryState&) const = default;
};

using Snapshot = std::map<std::string, EntryState>;

Snapshot snapshot(const fs::path& root, const fs::path& excluded) {
  Snapshot out;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) return out;
  const auto excluded_norm = excluded.lexically_normal();
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec), end;
  for (; !ec && it != end; it.increment(ec)) {
    const auto& path = it->path();
    if (path.lexically_normal() == excluded_norm) {
      it.disable_recursion_pending();
      continue;
    }
    if (path.filename() == ".lock") continue;
    const auto status = it->symlink_status(ec);
    EntryState state{status.type(), 0, {}};
    if (status.type() == fs::file_type::regular) state.size = fs::file_size(path, ec);
    state.mtime = fs::last_write_time(path, ec);
    out[fs::relative(path, root).generic_string()] = state;
  }
  return out;
}

std::vector<std::string> diff(const Snapshot& before, const Snapshot& after) {
  std::vector<std::string> changed;
  for (const auto& [path, state] : after) {
    auto it = before.find(path);
    if (it == before.end() || !(it->second == state)) changed.push_back(path);
  }
  for (const auto& [path, state] : before) {
    if (!after.count(path)) changed.push_back(path);
  }
  return changed;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

}  // namespace

std::vector<std::string> split_command(const std::string& command) {
  std::istringstream in(command);
  std::vector<std::string> out;
  std::string word;
  while (in >> word) out.push_back(word);
  return out;
}

SandboxPolicy policy_from_config(const RunConfig& config) {
  SandboxPolicy p;
  p.interpreter_command = split_command(config.interpreter_command);
  p.timeout = std::chrono::duration<double>(config.script_timeout);
  p.kill_grace = std::chrono::duration<double>(config.sandbox.kill_grace);
  p.env[kSeedVariable] = std::to_string(config.seed);
  p.no_network = config.sandbox.no_network;
  p.landlock = config.sandbox.landlock && config.sandbox.mode == IsolationMode::Process;
  p.file_size_limit_bytes = config.sandbox.file_size_limit_mb * 1024ULL * 1024ULL;
  p.toolkit_path = config.sandbox.toolkit_path;
  if (config.sandbox.mode == IsolationMode::Container) p.container_prefix = config.sandbox.container_prefix;
  for (const auto& name : config.sandbox.env_allowlist) p.env_allowlist.push_back(name);
  return p;
}

ExecutionRecord execute_script(const ScriptSource& source, const fs::path& work_dir, const SandboxPolicy& policy) {
  if (!fs::is_directory(work_dir)) throw Error(ErrorCode::SpawnFailure, work_dir.string(), "working directory missing");
  if (policy.interpreter_command.empty()) throw Error(ErrorCode::SpawnFailure, "", "empty interpreter command");
  const auto dir = fs::absolute(work_dir).lexically_normal();

  std::string body = source.body;
  if (body.empty() || body.back() != '\n') body += '\n';
  write_text_atomic(dir / kScriptFileName, body);

  ScratchDir scratch;
  const bool container = !policy.container_prefix.empty();

  LandlockRules confinement;
  if (policy.landlock && !container) confinement = build_write_confinement({dir, scratch.path()}, policy.no_network);

  std::vector<std::string> python_path;
  if (policy.toolkit_path) python_path.push_back(fs::absolute(*policy.toolkit_path).string());
  if (policy.no_network && !confinement.network_denied) {
    const auto guard_dir = scratch.path() / "guard";
    fs::create_directory(guard_dir);
    write_text_atomic(guard_dir / "sitecustomize.py", kNetworkGuard);
    python_path.push_back(guard_dir.string());
  }

  std::vector<std::string> env;
  for (const auto& name : policy.env_allowlist) {
    if (const char* value = std::getenv(name.c_str()); value != nullptr) env.push_back(name + "=" + value);
  }
  if (!std::getenv("PATH")) env.push_back("PATH=/usr/local/bin:/usr/bin:/bin");
  const std::map<std::string, std::string> fixed = {
      {"HOME", scratch.path().string()},   {"TMPDIR", scratch.path().string()},
      {"PYTHONDONTWRITEBYTECODE", "1"},    {"PYTHONHASHSEED", "0"},
      {"PYTHONUNBUFFERED", "1"},           {"MPLBACKEND", "Agg"},
      {"MPLCONFIGDIR", scratch.path().string()},
      {"PYTHONPATH", join(python_path, ":")},
  };
  for (const auto& [k, v] : fixed) env.push_back(k + "=" + v);
  for (const auto& [k, v] : policy.env) env.push_back(k + "=" + v);

  ProcessSpec spec;
  spec.argv = policy.container_prefix;
  spec.argv.insert(spec.argv.end(), policy.interpreter_command.begin(), policy.interpreter_command.end());
  spec.argv.push_back(kScriptFileName);
  spec.env = std::move(env);
  spec.cwd = dir;
  spec.stdout_path = dir / "stdout.log";
  spec.stderr_path = dir / "stderr.log";
  spec.timeout = policy.timeout;
  spec.cpu_seconds = static_cast<std::uint64_t>(std::ceil(policy.timeout.count())) + 1;
  spec.file_size_bytes = policy.file_size_limit_bytes;
  spec.landlock_ruleset = confinement.ruleset ? confinement.ruleset.get() : -1;

  const auto watch_root = policy.watch_root ? fs::absolute(*policy.watch_root) : dir.parent_path();
  const auto before = snapshot(watch_root, dir);
  const auto result = run_process(spec);
  const auto escaped = diff(before, snapshot(watch_root, dir));
  if (!escaped.empty()) {
    spdlog::error("script in {} modified {} path(s) outside its working directory", dir.string(), escaped.size());
    throw Error(ErrorCode::SandboxViolation, join(escaped, ","), "write outside the working directory");
  }

  if (result.timed_out && result.wall_time > (policy.timeout + policy.kill_grace).count())
    spdlog::warn("script in {} took {:.1f} s to die after its {:.0f} s timeout", dir.string(), result.wall_time,
                 policy.timeout.count());

  ExecutionRecord record;
  record.exit_status = result.exit_status;
  record.wall_time = result.wall_time;
  record.timed_out = result.timed_out;
  record.stdout_path = spec.stdout_path;
  record.stderr_path = spec.stderr_path;
  record.landlock_enforced = static_cast<bool>(confinement.ruleset);
  return record;
}

}  // namespace hypoflow::sandbox
