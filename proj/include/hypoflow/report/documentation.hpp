#pragma once

#include <string>
#include <vector>

#include "hypoflow/agents/agent.hpp"
#include "hypoflow/core/run_store.hpp"
#include "hypoflow/report/document.hpp"
#include "hypoflow/sandbox/runner.hpp"

namespace hypoflow::report {

struct DocumentationContext {
  agents::AgentRunner& agents;
  const agents::PromptLibrary& prompts;
  const RunConfig& config;
  const RunStore& store;
  const ResearchQuery& query;
  const ResearchIdea& idea;
  std::vector<RoundArtifacts> rounds;  // successful rounds, ascending
  sandbox::ScriptRunner& scripts;
  // Plot failures fail the run instead of degrading to a figureless report.
  bool strict = false;
};

struct PlotDesign {
  sandbox::ScriptSource script;
  llm::Transcript designer_transcript;
};

// Plot_Designer_1 writes a plotting script over the round artifacts and
// Plot_Designer_2 reviews it. Throws PreconditionFailed without rounds.
PlotDesign design_plots(DocumentationContext& ctx);

struct PlotOutput {
  std::vector<fs::path> figures;
  json fit_params = json::object();
};

// Executes the plot script in plots/ (one repair pass on failure) and checks
// its outputs: at least one PNG/PDF figure and a well-formed fit_params.json.
PlotOutput render_plots(DocumentationContext& ctx, const PlotDesign& design);

// One multimodal Plot_Analyzer call per figure, image attached.
std::vector<FigureAnalysis> analyze_figures(DocumentationContext& ctx, const std::vector<fs::path>& figures,
                                            const json& fit_params = json::object());

struct SectionContext {
  std::string rounds;
  std::string figures;
  std::string fit_params;
};

SectionContext make_section_context(const DocumentationContext& ctx, const std::vector<FigureAnalysis>& analyses,
                                    const json& fit_params);

// Writer generates the body; the paired reflector approves or revises it and
// supplies the highlight box.
ReportSection write_section(DocumentationContext& ctx, SectionKind kind, const SectionContext& section_ctx);

struct DocumentationResult {
  std::vector<fs::path> figures;
  std::vector<FigureAnalysis> analyses;
  std::vector<ReportSection> sections;
  DocumentFiles files;
  json fit_params = json::object();
  std::vector<std::string> warnings;
};

// The whole documentation stage; writer pairs run concurrently.
DocumentationResult run_documentation(DocumentationContext& ctx);

}  // namespace hypoflow::report
