#include "hypoflow/pipeline/pipeline.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "hypoflow/agents/sections.hpp"
#include "hypoflow/core/error.hpp"
#include "hypoflow/core/roles.hpp"
#include "hypoflow/pipeline/bindings.hpp"
#include "hypoflow/pipeline/repair.hpp"
#include "hypoflow/sandbox/artifacts.hpp"

namespace hypoflow::pipeline {

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
  return out;
}

std::string origin(const std::string& role, int index) { return role + "#" + std::to_string(index); }

std::string rel(const fs::path& path, const fs::path& root) {
  if (path.empty()) return {};
  return fs::relative(path, root).generic_string();
}

}  // namespace

json prompt_provenance(const agents::PromptLibrary& prompts) {
  json out = json::object();
  for (const auto& [role, t] : prompts.all()) out[role] = {{"version", t.version}, {"sha256", t.sha256}};
  return json{{"prompts", out}};
}

json run_record_to_json(const RunRecord& record, const fs::path& run_root) {
  json j;
  j["run_id"] = record.run_id;
  j["status"] = record.status;
  if (record.status.stage == Stage::Failed) {
    j["failure"] = {{"code", record.failure_code ? std::string(to_string(*record.failure_code)) : "Unknown"},
                    {"subject", record.failure_subject},
                    {"reason", record.status.failure_reason}};
  }
  j["query"] = record.query;
  j["idea"] = record.idea ? json(*record.idea) : json(nullptr);
  j["rounds"] = json::array();
  for (const auto& r : record.rounds) {
    auto copy = r;
    copy.script_path = rel(r.script_path, run_root);
    copy.results_path = rel(r.results_path, run_root);
    copy.final_results_path = rel(r.final_results_path, run_root);
    copy.notes_path = rel(r.notes_path, run_root);
    copy.stdout_log = rel(r.stdout_log, run_root);
    copy.stderr_log = rel(r.stderr_log, run_root);
    j["rounds"].push_back(copy);
  }
  j["figures"] = record.figures;
  j["sections"] = json::array();
  for (const auto& s : record.sections)
    j["sections"].push_back({{"kind", report::to_string(s.kind)},
                             {"file", "report/" + report::section_file_name(s.kind)},
                             {"highlight_box", s.highlight_box}});
  j["continuity"] = json::array();
  for (const auto& c : record.continuity)
    j["continuity"].push_back({{"from_round", c.from_round}, {"to_round", c.to_round}, {"violations", c.report.violations}});
  j["registry_violations"] = record.registry_violations;
  j["warnings"] = record.warnings;
  return j;
}

Pipeline::Pipeline(RunHandle& run, llm::Backend& backend, const agents::PromptLibrary& prompts,
                   const ToolRegistry& registry, sandbox::ScriptRunner& scripts, PipelineOptions options)
    : run_(run),
      backend_(backend),
      prompts_(prompts),
      registry_(registry),
      scripts_(scripts),
      options_(options),
      agents_(backend, &run.store) {
  std::vector<agents::AgentSpec> roster;
  for (auto role : roles::kAll) roster.push_back(agent(role));
  agents::validate_roster(roster, {std::string(roles::kPlotAnalyzer)});
  idea_ = run_.store.load_idea();
  load_completed_rounds();
}

agents::AgentSpec Pipeline::agent(std::string_view role) const {
  return agents::make_agent(std::string(role), prompts_, run_.config);
}

agents::Bindings Pipeline::base_bindings() const {
  agents::Bindings b{{"query", run_.query.text},
                     {"constraints", render_constraints(run_.query.constraints)},
                     {"tools", registry_.render()},
                     {"n_test", std::to_string(run_.state.n_test)}};
  if (idea_) b["idea"] = agents::format_idea(*idea_);
  return b;
}

void Pipeline::load_completed_rounds() {
  rounds_.clear();
  continuity_.clear();
  for (int k = 0; k < run_.state.rounds_completed; ++k) {
    rounds_.push_back(sandbox::collect_artifacts(run_.store.round_dir(k), k));
    if (k > 0) {
      continuity_.push_back({k - 1, k,
                             check_continuity(read_json(rounds_[k - 1].results_path), read_json(rounds_[k].results_path))});
    }
  }
}

void Pipeline::check_round(const RoundArtifacts& round) {
  const auto dir = round.results_path.parent_path();
  const auto unknown = sandbox::unregistered_tools(sandbox::read_tool_call_log(dir), registry_);
  for (const auto& name : unknown) {
    const auto msg = "round_" + std::to_string(round.round_index) + ": " + name;
    if (options_.strict) throw Error(ErrorCode::RegistryViolation, name, "tool not in the registry");
    spdlog::warn("unregistered tool call in {}", msg);
    registry_violations_.push_back(msg);
  }

  if (round.round_index == 0) return;
  const auto& prev = rounds_.at(round.round_index - 1);
  ContinuityEntry entry{prev.round_index, round.round_index,
                        check_continuity(read_json(prev.results_path), read_json(round.results_path))};
  continuity_.push_back(entry);
  if (entry.report.ok()) return;
  const auto detail = join(entry.report.violations);
  if (options_.strict) throw Error(ErrorCode::ContinuityViolation, "round_" + std::to_string(round.round_index), detail);
  spdlog::warn("continuity violation in round_{}: {}", round.round_index, detail);
  warnings_.push_back("continuity round_" + std::to_string(round.round_index) + ": " + detail);
}

RoundArtifacts Pipeline::execute_round(int k, const sandbox::ScriptSource& script, const agents::AgentSpec& repairer,
                                       const llm::Transcript& partner, const agents::Bindings& bindings) {
  ExecutionJob job;
  job.work_dir = run_.store.round_dir(k);
  job.script = script;
  job.env = {{"HYPOFLOW_ROUND_INDEX", std::to_string(k)}};
  if (k > 0) job.env["HYPOFLOW_PREVIOUS_ROUND_DIR"] = "../round_" + std::to_string(k - 1);
  job.verify = [k](const fs::path& dir) { sandbox::collect_artifacts(dir, k); };
  job.repairer = &repairer;
  job.partner_transcript = partner;
  job.bindings = bindings;
  const auto outcome = execute_with_repair(agents_, scripts_, std::move(job));

  auto round = sandbox::collect_artifacts(run_.store.round_dir(k), k);
  round.exit_status = outcome.record.exit_status;
  round.wall_time = outcome.record.wall_time;
  check_round(round);
  rounds_.push_back(round);
  return round;
}

ResearchIdea Pipeline::ideate() {
  if (registry_.empty()) throw Error(ErrorCode::PreconditionFailed, "registry", "no tools registered");
  const auto scientist = agent(roles::kScientist1);
  const auto critic = agent(roles::kScientist2);
  const auto bindings = base_bindings();

  const auto proposal = agents_.run_generation(scientist, bindings);
  const auto review = agents_.run_reflection(critic, proposal.transcript, bindings);
  auto idea = agents::parse_idea(review.decision == agents::ReflectionDecision::Revised ? review.payload
                                                                                       : proposal.output);
  run_.store.save_idea(idea);
  idea_ = idea;
  return idea;
}

RoundArtifacts Pipeline::initial_test() {
  if (!idea_) throw Error(ErrorCode::PreconditionFailed, "idea.json", "ideation has not completed");
  const auto coder = agent(roles::kCoder1);
  const auto reviewer = agent(roles::kCoder2);
  auto bindings = base_bindings();

  const auto draft = agents_.run_generation(coder, bindings);
  auto script = sandbox::extract_script(draft.output, origin(coder.role, draft.call_index));
  bindings["code"] = script.body;
  const auto review = agents_.run_reflection(reviewer, draft.transcript, bindings);
  if (review.decision == agents::ReflectionDecision::Revised)
    script = sandbox::ScriptSource{review.payload, "", origin(reviewer.role, review.call_index)};
  return execute_round(0, script, reviewer, draft.transcript, bindings);
}

RefinementDecision Pipeline::decide_refinement(int k) {
  const auto& current = rounds_.at(k);
  const auto refiner = agent(roles::kRefiner1);
  const auto reviewer = agent(roles::kRefiner2);
  auto bindings = base_bindings();
  bindings["code"] = read_capped(current.script_path);
  bindings["results"] = read_capped(current.results_path);
  bindings["final_results"] = read_capped(current.final_results_path);
  bindings["notes"] = read_capped(current.notes_path);
  bindings["round"] = std::to_string(k + 1);
  bindings["previous_round_dir"] = "../round_" + std::to_string(k);

  const auto proposal = agents_.run_generation(refiner, bindings);
  const auto review = agents_.run_reflection(reviewer, proposal.transcript, bindings, {.allow_halt = true});

  RefinementDecision d;
  d.rationale = proposal.output;
  d.refiner_transcript = proposal.transcript;
  switch (review.decision) {
    case agents::ReflectionDecision::Halt:
      d.outcome = RefinementDecision::Outcome::NoFollowUp;
      break;
    case agents::ReflectionDecision::Revised:
      d.outcome = RefinementDecision::Outcome::FollowUp;
      d.script = sandbox::ScriptSource{review.payload, "", origin(reviewer.role, review.call_index)};
      break;
    case agents::ReflectionDecision::Approved:
      if (agents::contains_flag(proposal.output, agents::kNoFollowUpFlag) &&
          sandbox::fenced_blocks(proposal.output).empty()) {
        d.outcome = RefinementDecision::Outcome::NoFollowUp;
      } else {
        d.outcome = RefinementDecision::Outcome::FollowUp;
        d.script = sandbox::extract_script(proposal.output, origin(refiner.role, proposal.call_index));
      }
      break;
  }
  return d;
}

std::optional<RoundArtifacts> Pipeline::refine_step() {
  if (run_.state.stage != Stage::Refinement)
    throw Error(ErrorCode::IllegalTransition, run_.state.label(), "refine_step outside Refinement");
  const int k = run_.state.refinement_round;
  if (k >= run_.state.n_test) {
    run_.state = advance(run_.state, StageEvent::BudgetExhausted);
    return std::nullopt;
  }
  auto decision = decide_refinement(k);
  if (decision.outcome == RefinementDecision::Outcome::NoFollowUp) {
    spdlog::info("refinement stopped by NO_FOLLOWUP after round {}", k);
    run_.state = advance(run_.state, StageEvent::NoFollowUp);
    return std::nullopt;
  }
  const auto reviewer = agent(roles::kRefiner2);
  auto bindings = base_bindings();
  bindings["round"] = std::to_string(k + 1);
  bindings["previous_round_dir"] = "../round_" + std::to_string(k);
  auto round = execute_round(k + 1, decision.script, reviewer, decision.refiner_transcript, bindings);
  run_.state = advance(run_.state, StageEvent::FollowUpRequested);
  return round;
}

std::vector<RoundArtifacts> Pipeline::refine_loop() {
  std::vector<RoundArtifacts> out;
  while (run_.state.stage == Stage::Refinement)
    if (auto round = refine_step()) out.push_back(std::move(*round));
  return out;
}

report::DocumentationResult Pipeline::document() {
  if (!idea_) throw Error(ErrorCode::PreconditionFailed, "idea.json", "ideation has not completed");
  report::DocumentationContext ctx{agents_, prompts_, run_.config, run_.store, run_.query, *idea_, rounds_, scripts_,
                                   options_.strict};
  auto result = report::run_documentation(ctx);
  for (const auto& w : result.warnings) warnings_.push_back(w);
  documentation_ = result;
  return result;
}

RunRecord Pipeline::record() const {
  RunRecord r;
  r.run_id = run_.store.run_id();
  r.config = run_.config;
  r.query = run_.query;
  r.idea = idea_;
  r.rounds = rounds_;
  if (documentation_) {
    r.figures = documentation_->analyses;
    r.sections = documentation_->sections;
  }
  r.continuity = continuity_;
  r.registry_violations = registry_violations_;
  r.warnings = warnings_;
  r.status = run_.state;
  r.failure_code = failure_code_;
  r.failure_subject = failure_subject_;
  return r;
}

void Pipeline::persist_record(const RunRecord& record) const {
  write_json_atomic(run_.store.run_record_path(), run_record_to_json(record, run_.store.root()));
}

RunRecord Pipeline::run() {
  try {
    while (!run_.state.terminal()) {
      spdlog::info("run {}: {}", run_.store.run_id(), run_.state.label());
      switch (run_.state.stage) {
        case Stage::Ideation:
          ideate();
          run_.state = advance(run_.state, StageEvent::IdeaAccepted);
          break;
        case Stage::InitialTesting:
          initial_test();
          run_.state = advance(run_.state, StageEvent::InitialTestCompleted);
          break;
        case Stage::Refinement:
          refine_step();
          break;
        case Stage::Documentation:
          document();
          run_.state = advance(run_.state, StageEvent::DocumentationCompleted);
          break;
        case Stage::Done:
        case Stage::Failed:
          break;
      }
    }
  } catch (const Error& e) {
    spdlog::error("run {} failed: {}", run_.store.run_id(), e.what());
    failure_code_ = e.code();
    failure_subject_ = e.subject();
    run_.state = advance(run_.state, StageEvent::Failure, e.what());
  } catch (const std::exception& e) {
    spdlog::error("run {} failed: {}", run_.store.run_id(), e.what());
    run_.state = advance(run_.state, StageEvent::Failure, e.what());
  }
  auto r = record();
  persist_record(r);
  return r;
}

RunRecord run_pipeline(llm::Backend& backend, const RunConfig& config, const ResearchQuery& query,
                       const ToolRegistry& registry, PipelineOptions options, std::optional<std::string> run_id) {
  const auto prompts = agents::PromptLibrary::load(config.prompts_dir);
  auto handle = new_run(config, query, std::move(run_id), prompt_provenance(prompts));
  sandbox::SandboxRunner runner(sandbox::policy_from_config(config), handle.store.root());
  Pipeline pipeline(handle, backend, prompts, registry, runner, options);
  return pipeline.run();
}

}  // namespace hypoflow::pipeline
