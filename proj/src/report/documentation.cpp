#include "hypoflow/report/documentation.hpp"

#include <cctype>
#include <future>
#include <sstream>

#include <spdlog/spdlog.h>

#include "hypoflow/agents/sections.hpp"
#include "hypoflow/core/error.hpp"
#include "hypoflow/core/roles.hpp"
#include "hypoflow/pipeline/bindings.hpp"
#include "hypoflow/pipeline/repair.hpp"
#include "hypoflow/sandbox/artifacts.hpp"

namespace hypoflow::report {

namespace {

agents::Bindings base_bindings(const DocumentationContext& ctx) {
  return {{"query", ctx.query.text},
          {"constraints", pipeline::render_constraints(ctx.query.constraints)},
          {"idea", agents::format_idea(ctx.idea)}};
}

void verify_plots(const fs::path& dir) {
  const auto params_path = dir / kFitParams;
  if (!fs::is_regular_file(params_path)) throw Error(ErrorCode::MissingArtifact, kFitParams);
  json doc;
  try {
    doc = read_json(params_path);
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedArtifact, kFitParams, e.what());
  }
  validate_fit_params(doc);
  if (list_figures(dir).empty()) throw Error(ErrorCode::MissingArtifact, "figure", "no PNG or PDF written to plots/");
}

std::string document_title(const ResearchIdea& idea) {
  std::string title;
  for (char c : trim(idea.idea)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!title.empty() && title.back() != ' ') title += ' ';
    } else {
      title += c;
    }
  }
  const auto end = title.find(". ");
  if (end != std::string::npos) title = title.substr(0, end);
  if (!title.empty() && title.back() == '.') title.pop_back();
  if (title.size() > 150) title = title.substr(0, 150);
  return title;
}

}  // namespace

PlotDesign design_plots(DocumentationContext& ctx) {
  if (ctx.rounds.empty()) throw Error(ErrorCode::PreconditionFailed, std::string(roles::kPlotDesigner1), "no successful rounds");
  const auto designer = agents::make_agent(std::string(roles::kPlotDesigner1), ctx.prompts, ctx.config);
  const auto reviewer = agents::make_agent(std::string(roles::kPlotDesigner2), ctx.prompts, ctx.config);

  auto bindings = base_bindings(ctx);
  bindings["rounds"] = pipeline::rounds_summary(ctx.rounds, ctx.store.plots_dir());

  auto generated = ctx.agents.run_generation(designer, bindings);
  auto script = sandbox::extract_script(generated.output, designer.role + "#" + std::to_string(generated.call_index));
  bindings["code"] = script.body;
  auto review = ctx.agents.run_reflection(reviewer, generated.transcript, bindings);
  if (review.decision == agents::ReflectionDecision::Revised)
    script = sandbox::ScriptSource{review.payload, "", reviewer.role + "#" + std::to_string(review.call_index)};
  return PlotDesign{std::move(script), std::move(generated.transcript)};
}

PlotOutput render_plots(DocumentationContext& ctx, const PlotDesign& design) {
  const auto reviewer = agents::make_agent(std::string(roles::kPlotDesigner2), ctx.prompts, ctx.config);
  pipeline::ExecutionJob job;
  job.work_dir = ctx.store.plots_dir();
  job.script = design.script;
  job.env = {{"HYPOFLOW_ROUNDS_DIR", "../rounds"}};
  job.verify = verify_plots;
  job.repairer = &reviewer;
  job.partner_transcript = design.designer_transcript;
  job.bindings = base_bindings(ctx);
  job.bindings["rounds"] = pipeline::rounds_summary(ctx.rounds, ctx.store.plots_dir());
  const auto outcome = pipeline::execute_with_repair(ctx.agents, ctx.scripts, std::move(job));

  // The script ran as script.py; keep it under its documented name as well.
  const auto plots = ctx.store.plots_dir();
  fs::rename(plots / sandbox::kScriptFileName, plots / kPlotScript);

  PlotOutput out;
  out.figures = list_figures(plots);
  out.fit_params = read_json(plots / kFitParams);
  return out;
}

std::vector<FigureAnalysis> analyze_figures(DocumentationContext& ctx, const std::vector<fs::path>& figures,
                                            const json& fit_params) {
  std::vector<FigureAnalysis> out;
  if (figures.empty()) return out;
  const auto analyzer = agents::make_agent(std::string(roles::kPlotAnalyzer), ctx.prompts, ctx.config);
  for (const auto& figure : figures) {
    auto bindings = base_bindings(ctx);
    const auto name = figure.filename().string();
    bindings["figure"] = name;
    const auto stem = figure.stem().string();
    if (fit_params.contains(name))
      bindings["fit_params"] = fit_params[name].dump(2);
    else if (fit_params.contains(stem))
      bindings["fit_params"] = fit_params[stem].dump(2);
    else
      bindings["fit_params"] = "(none reported)";
    const auto reply = ctx.agents.run_generation(analyzer, bindings, {fs::absolute(figure).string()});
    auto analysis = parse_figure_analysis(reply.output, figure);
    analysis.figure_path = fs::relative(figure, ctx.store.root());
    out.push_back(std::move(analysis));
  }
  return out;
}

SectionContext make_section_context(const DocumentationContext& ctx, const std::vector<FigureAnalysis>& analyses,
                                    const json& fit_params) {
  SectionContext s;
  s.rounds = pipeline::rounds_summary(ctx.rounds, ctx.store.root());
  if (analyses.empty()) {
    s.figures = kNoFiguresNotice;
  } else {
    std::ostringstream out;
    for (const auto& a : analyses) {
      out << "Figure " << a.figure_path.filename().string() << "\nCaption: " << a.caption
          << "\nInterpretation: " << a.interpretation << "\nKey insights:\n";
      for (const auto& k : a.key_insights) out << "- " << k << "\n";
      out << "\n";
    }
    s.figures = out.str();
  }
  s.fit_params = fit_params.empty() ? "(none)" : fit_params.dump(2);
  return s;
}

ReportSection write_section(DocumentationContext& ctx, SectionKind kind, const SectionContext& section_ctx) {
  const auto writer = agents::make_agent(writer_role(kind), ctx.prompts, ctx.config);
  const auto reflector = agents::make_agent(reflector_role(kind), ctx.prompts, ctx.config);
  auto bindings = base_bindings(ctx);
  bindings["section"] = std::string(to_string(kind));
  bindings["rounds"] = section_ctx.rounds;
  bindings["figures"] = section_ctx.figures;
  bindings["fit_params"] = section_ctx.fit_params;

  const auto draft = ctx.agents.run_generation(writer, bindings);
  const auto review = ctx.agents.run_reflection(reflector, draft.transcript, bindings);
  ReportSection section;
  section.kind = kind;
  section.highlight_box = extract_highlight(review.reply, reflector.role);
  section.body = review.decision == agents::ReflectionDecision::Revised ? trim(review.payload)
                                                                        : section_body(draft.output);
  return section;
}

DocumentationResult run_documentation(DocumentationContext& ctx) {
  DocumentationResult result;
  try {
    const auto design = design_plots(ctx);
    auto plots = render_plots(ctx, design);
    result.figures = std::move(plots.figures);
    result.fit_params = std::move(plots.fit_params);
  } catch (const Error& e) {
    if (ctx.strict || e.code() == ErrorCode::SandboxViolation || e.code() == ErrorCode::FixtureMiss) throw;
    spdlog::warn("plot stage failed, continuing without figures: {}", e.what());
    result.warnings.push_back(std::string("plots: ") + e.what());
  }
  result.analyses = analyze_figures(ctx, result.figures, result.fit_params);

  const auto section_ctx = make_section_context(ctx, result.analyses, result.fit_params);
  std::vector<std::future<ReportSection>> pending;
  for (auto kind : kSectionOrder)
    pending.push_back(std::async(std::launch::async, [&ctx, &section_ctx, kind] {
      return write_section(ctx, kind, section_ctx);
    }));
  std::exception_ptr first_error;
  for (auto& f : pending) {
    try {
      result.sections.push_back(f.get());
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);

  result.files = assemble_document(ctx.store.report_dir(), result.sections, result.analyses,
                                   DocumentMetadata{document_title(ctx.idea), ctx.store.run_id()});
  if (ctx.config.compile_report) result.files.compiled = compile_document(ctx.store.report_dir(), ctx.config.latex_command);
  return result;
}

}  // namespace hypoflow::report
