#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypoflow/agents/prompt_template.hpp"
#include "hypoflow/core/config.hpp"
#include "hypoflow/core/run_store.hpp"
#include "hypoflow/core/types.hpp"
#include "hypoflow/llm/scripted_backend.hpp"
#include "hypoflow/pipeline/pipeline.hpp"
#include "hypoflow/sandbox/runner.hpp"

namespace hypoflow::testing {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const fs::path& p) const { return path_ / p; }

 private:
  fs::path path_;
};

fs::path source_dir();
fs::path example_fixtures_path();
fs::path early_stop_fixtures_path();
fs::path mock_config_path();
fs::path query_path();

// configs/mock.json with the workspace moved to `workspace`.
RunConfig mock_config(const fs::path& workspace);
ResearchQuery example_query();
ToolRegistry shipped_registry();
llm::Fixtures example_fixtures();

// Replaces the replies of `role` in `fixtures`.
void set_replies(llm::Fixtures& fixtures, const std::string& role, const std::vector<std::string>& replies);

// SHA-256 over every relative path and file content below `root`, in sorted
// order. Equal trees give equal digests.
std::string tree_digest(const fs::path& root);

std::string slurp(const fs::path& path);
void spit(const fs::path& path, const std::string& text);

// In-process script runner for fast tests. It ignores the script body and
// writes the three artifact files itself; results.json grows append-only from
// the previous round. Plot directories get one PNG and fit_params.json.
class StubRunner final : public sandbox::ScriptRunner {
 public:
  sandbox::ExecutionRecord run(const sandbox::ScriptSource& source, const fs::path& work_dir,
                               const sandbox::EnvOverrides& env) override;
  int runs = 0;
  // Runs after the default artifacts are written; may rewrite files or set a
  // failing exit status.
  std::function<void(const sandbox::ScriptSource&, const fs::path&, const sandbox::EnvOverrides&,
                     sandbox::ExecutionRecord&)>
      hook;
};

// Minimal fixture set for a full run under StubRunner: every reflector
// approves, Refiner_2 follows `refiner_decisions` ("APPROVED", "NO_FOLLOWUP"
// or "REVISE").
llm::Fixtures stub_fixtures(const std::vector<std::string>& refiner_decisions);

// Everything needed to drive a Pipeline over the scripted backend and the
// stub runner in a throwaway workspace.
struct StubHarness {
  explicit StubHarness(llm::Fixtures fixtures, int n_test = 3, pipeline::PipelineOptions options = {true});

  pipeline::Pipeline pipeline();
  const RunStore& store() const { return handle.store; }

  TempDir workspace;
  RunConfig config;
  agents::PromptLibrary prompts;
  ToolRegistry registry;
  llm::ScriptedBackend backend;
  StubRunner runner;
  RunHandle handle;
  pipeline::PipelineOptions options;
};

// Breaches of the history protocol in the backend's call log: generators see
// an empty history, reflectors exactly their partner's latest transcript.
std::vector<std::string> history_violations(const llm::ScriptedBackend& backend);

}  // namespace hypoflow::testing
