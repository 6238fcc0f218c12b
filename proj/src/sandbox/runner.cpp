#include "hypoflow/sandbox/runner.hpp"

namespace hypoflow::sandbox {

SandboxRunner::SandboxRunner(SandboxPolicy policy, fs::path watch_root)
    : policy_(std::move(policy)), watch_root_(std::move(watch_root)) {}

ExecutionRecord SandboxRunner::run(const ScriptSource& source, const fs::path& work_dir, const EnvOverrides& env) {
  auto policy = policy_;
  for (const auto& [k, v] : env) policy.env[k] = v;
  policy.watch_root = watch_root_;
  return execute_script(source, work_dir, policy);
}

}  // namespace hypoflow::sandbox
