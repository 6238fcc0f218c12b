#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypoflow/agents/agent.hpp"
#include "hypoflow/core/error.hpp"
#include "hypoflow/core/run_store.hpp"
#include "hypoflow/pipeline/continuity.hpp"
#include "hypoflow/report/documentation.hpp"
#include "hypoflow/sandbox/runner.hpp"

namespace hypoflow::pipeline {

struct RefinementDecision {
  enum class Outcome { FollowUp, NoFollowUp };
  Outcome outcome = Outcome::NoFollowUp;
  sandbox::ScriptSource script;  // non-empty for FollowUp
  std::string rationale;         // Refiner_1's reply
  llm::Transcript refiner_transcript;
};

struct ContinuityEntry {
  int from_round = 0;
  int to_round = 0;
  ContinuityReport report;
};

struct RunRecord {
  std::string run_id;
  RunConfig config;
  ResearchQuery query;
  std::optional<ResearchIdea> idea;
  std::vector<RoundArtifacts> rounds;
  std::vector<report::FigureAnalysis> figures;
  std::vector<report::ReportSection> sections;
  std::vector<ContinuityEntry> continuity;
  std::vector<std::string> registry_violations;
  std::vector<std::string> warnings;
  RunState status;
  std::optional<ErrorCode> failure_code;
  std::string failure_subject;
};

// run_record.json; paths are relative to the run directory.
json run_record_to_json(const RunRecord& record, const fs::path& run_root);

struct PipelineOptions {
  // Continuity and tool-registry violations fail the run, and so does a
  // failed plot stage. On for scripted backends.
  bool strict = false;
};

// Drives one run through its remaining stages. Errors are caught at run()
// and turn the run Failed; the stage methods themselves throw.
class Pipeline {
 public:
  Pipeline(RunHandle& run, llm::Backend& backend, const agents::PromptLibrary& prompts, const ToolRegistry& registry,
           sandbox::ScriptRunner& scripts, PipelineOptions options = {});

  ResearchIdea ideate();
  RoundArtifacts initial_test();
  // One refinement step from Refinement(k): either stops the loop or executes
  // round k+1. Returns the new round when one ran.
  std::optional<RoundArtifacts> refine_step();
  // All remaining refinement steps.
  std::vector<RoundArtifacts> refine_loop();
  RefinementDecision decide_refinement(int k);
  report::DocumentationResult document();

  // Continues from the current stage to Done or Failed and writes
  // run_record.json either way.
  RunRecord run();

  const RunState& state() const { return run_.state; }
  RunRecord record() const;

 private:
  agents::AgentSpec agent(std::string_view role) const;
  agents::Bindings base_bindings() const;
  RoundArtifacts execute_round(int k, const sandbox::ScriptSource& script, const agents::AgentSpec& repairer,
                               const llm::Transcript& partner, const agents::Bindings& bindings);
  void check_round(const RoundArtifacts& round);
  void load_completed_rounds();
  void persist_record(const RunRecord& record) const;

  RunHandle& run_;
  llm::Backend& backend_;
  const agents::PromptLibrary& prompts_;
  const ToolRegistry& registry_;
  sandbox::ScriptRunner& scripts_;
  PipelineOptions options_;
  agents::AgentRunner agents_;

  std::optional<ResearchIdea> idea_;
  std::vector<RoundArtifacts> rounds_;
  std::vector<ContinuityEntry> continuity_;
  std::vector<std::string> registry_violations_;
  std::vector<std::string> warnings_;
  std::optional<report::DocumentationResult> documentation_;
  std::optional<ErrorCode> failure_code_;
  std::string failure_subject_;
};

// Creates a fresh run in config.workspace and drives it to a terminal state
// with the process sandbox.
RunRecord run_pipeline(llm::Backend& backend, const RunConfig& config, const ResearchQuery& query,
                       const ToolRegistry& registry, PipelineOptions options = {},
                       std::optional<std::string> run_id = {});

// Prompt hashes and versions recorded into config.json for provenance.
json prompt_provenance(const agents::PromptLibrary& prompts);

}  // namespace hypoflow::pipeline
