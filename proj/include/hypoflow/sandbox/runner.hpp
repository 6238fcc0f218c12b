#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "hypoflow/sandbox/executor.hpp"

namespace hypoflow::sandbox {

using EnvOverrides = std::map<std::string, std::string>;

// Seam between orchestration and execution so the pipeline can be driven by
// an in-process runner in tests.
class ScriptRunner {
 public:
  virtual ~ScriptRunner() = default;
  virtual ExecutionRecord run(const ScriptSource& source, const fs::path& work_dir, const EnvOverrides& env) = 0;
};

class SandboxRunner final : public ScriptRunner {
 public:
  SandboxRunner(SandboxPolicy policy, fs::path watch_root);
  ExecutionRecord run(const ScriptSource& source, const fs::path& work_dir, const EnvOverrides& env) override;

 private:
  SandboxPolicy policy_;
  fs::path watch_root_;
};

}  // namespace hypoflow::sandbox
