#include "hypoflow/cli/commands.hpp"

#include <cstdlib>
#include <memory>

#include <nlohmann/json.hpp>

#include "hypoflow/agents/prompt_template.hpp"
#include "hypoflow/core/error.hpp"
#include "hypoflow/core/run_store.hpp"
#include "hypoflow/llm/live_backend.hpp"
#include "hypoflow/llm/scripted_backend.hpp"
#include "hypoflow/pipeline/continuity.hpp"
#include "hypoflow/pipeline/pipeline.hpp"
#include "hypoflow/report/figures.hpp"
#include "hypoflow/report/sections.hpp"
#include "hypoflow/sandbox/runner.hpp"

namespace hypoflow::cli {

namespace {

using json = nlohmann::json;

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidQuery:
    case ErrorCode::InvalidIdea:
    case ErrorCode::InvalidTool:
    case ErrorCode::DuplicateTool:
    case ErrorCode::InvalidConfig:
    case ErrorCode::MissingRoleBinding:
    case ErrorCode::InvalidTemperature:
    case ErrorCode::InvalidReasoningEffort:
    case ErrorCode::NonPositiveTimeout:
    case ErrorCode::WorkspaceUnwritable:
    case ErrorCode::RunAlreadyExists:
    case ErrorCode::RunLocked:
    case ErrorCode::NotARunDirectory:
    case ErrorCode::MissingArtifact:
    case ErrorCode::MalformedArtifact:
      return true;
    default:
      return false;
  }
}

struct Inputs {
  RunConfig config;
  ResearchQuery query;
  ToolRegistry registry;
  agents::PromptLibrary prompts;
};

void apply_overrides(RunConfig& config, const CommandOptions& opts) {
  if (opts.seed) config.seed = *opts.seed;
  if (opts.workspace) config.workspace = fs::absolute(*opts.workspace);
}

ResearchQuery load_query(const fs::path& path) {
  json doc;
  try {
    doc = read_json(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidQuery, path.string(), e.what());
  }
  ResearchQuery q;
  try {
    q = doc.get<ResearchQuery>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidQuery, path.string(), e.what());
  }
  q.validate();
  return q;
}

Inputs load_inputs(const fs::path& config_path, const std::optional<fs::path>& query_path, const CommandOptions& opts) {
  Inputs in{load_config(config_path), {}, {}, {}};
  apply_overrides(in.config, opts);
  if (query_path) in.query = load_query(*query_path);
  in.registry = ToolRegistry::load(in.config.registry_path);
  in.prompts = agents::PromptLibrary::load(in.config.prompts_dir);
  return in;
}

std::unique_ptr<llm::Backend> live_backend(const RunConfig& config) {
  const char* key = std::getenv(config.backend.api_key_env.c_str());
  if (key == nullptr || *key == '\0')
    throw Error(ErrorCode::InvalidConfig, config.backend.api_key_env, "API key environment variable is not set");
  llm::LiveSettings s;
  s.base_url = config.backend.base_url;
  s.api_key = key;
  s.max_attempts = config.backend.max_attempts;
  s.initial_backoff = std::chrono::duration<double>(config.backend.initial_backoff);
  s.request_timeout = std::chrono::duration<double>(config.backend.request_timeout);
  return std::make_unique<llm::LiveBackend>(s);
}

int report_error(const Error& e, const CommandOptions& opts) {
  const int code = is_validation_error(e.code()) ? kExitInvalid : kExitFailed;
  auto& out = *opts.out;
  if (opts.json) {
    out << json{{"error", {{"code", to_string(e.code())}, {"subject", e.subject()}, {"message", e.what()}}}}.dump(2)
        << "\n";
  } else {
    out << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::FixtureMiss) out << "missing fixture: " << e.subject() << "\n";
  }
  return code;
}

int report_run(const pipeline::RunRecord& record, const RunStore& store, const CommandOptions& opts) {
  const bool done = record.status.stage == Stage::Done;
  auto& out = *opts.out;
  if (opts.json) {
    auto j = pipeline::run_record_to_json(record, store.root());
    j["run_dir"] = store.root().string();
    j["run_record"] = store.run_record_path().string();
    out << j.dump(2) << "\n";
  } else {
    out << "run: " << store.root().string() << "\n"
        << "status: " << record.status.label() << "\n"
        << "rounds: " << record.rounds.size() << "\n"
        << "figures: " << record.figures.size() << "\n"
        << "sections: " << record.sections.size() << "\n";
    if (!done) {
      out << "error: " << record.status.failure_reason << "\n";
      if (record.failure_code == ErrorCode::FixtureMiss) out << "missing fixture: " << record.failure_subject << "\n";
    }
    out << "run_record: " << store.run_record_path().string() << "\n";
  }
  return done ? kExitDone : kExitFailed;
}

int drive(RunHandle& handle, llm::Backend& backend, const Inputs& in, bool strict, const CommandOptions& opts) {
  sandbox::SandboxRunner runner(sandbox::policy_from_config(handle.config), handle.store.root());
  pipeline::Pipeline p(handle, backend, in.prompts, in.registry, runner, pipeline::PipelineOptions{strict});
  const auto record = p.run();
  return report_run(record, handle.store, opts);
}

int start_run(const fs::path& config_path, const fs::path& query_path, const std::optional<fs::path>& fixtures_path,
              const CommandOptions& opts) {
  try {
    auto in = load_inputs(config_path, query_path, opts);
    std::unique_ptr<llm::Backend> backend;
    if (fixtures_path) {
      in.config.backend.kind = BackendKind::Scripted;
      backend = std::make_unique<llm::ScriptedBackend>(llm::load_fixtures(*fixtures_path));
    } else {
      backend = live_backend(in.config);
    }
    auto handle = new_run(in.config, in.query, opts.run_id, pipeline::prompt_provenance(in.prompts));
    return drive(handle, *backend, in, fixtures_path.has_value(), opts);
  } catch (const Error& e) {
    return report_error(e, opts);
  }
}

json census(const fs::path& dir) {
  json files = json::array();
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec))
    names.push_back(entry.path().filename().string() + (entry.is_directory() ? "/" : ""));
  std::sort(names.begin(), names.end());
  for (auto& n : names) files.push_back(n);
  return files;
}

}  // namespace

int cmd_validate(const fs::path& config_path, const std::optional<fs::path>& query_path, const CommandOptions& opts) {
  try {
    const auto in = load_inputs(config_path, query_path, opts);
    auto& out = *opts.out;
    if (opts.json) {
      out << json{{"validated", true},
                  {"roles", in.config.agent_models.size()},
                  {"tools", in.registry.tools().size()},
                  {"n_test", query_path ? effective_n_test(in.config, in.query) : in.config.n_test}}
                 .dump(2)
          << "\n";
    } else {
      out << "validated: " << config_path.string();
      if (query_path) out << ", " << query_path->string();
      out << " (" << in.registry.tools().size() << " tools, " << in.prompts.all().size() << " prompt templates)\n";
    }
    return kExitDone;
  } catch (const Error& e) {
    return report_error(e, opts);
  }
}

int cmd_run(const fs::path& config_path, const fs::path& query_path, const CommandOptions& opts) {
  return start_run(config_path, query_path, std::nullopt, opts);
}

int cmd_mock_run(const fs::path& config_path, const fs::path& query_path, const fs::path& fixtures_path,
                 const CommandOptions& opts) {
  return start_run(config_path, query_path, fixtures_path, opts);
}

int cmd_resume(const fs::path& run_dir, const std::optional<fs::path>& fixtures_path, const CommandOptions& opts) {
  try {
    auto handle = open_run(run_dir);
    apply_overrides(handle.config, opts);
    Inputs in{handle.config, handle.query, ToolRegistry::load(handle.config.registry_path),
              agents::PromptLibrary::load(handle.config.prompts_dir)};
    std::unique_ptr<llm::Backend> backend;
    if (fixtures_path)
      backend = std::make_unique<llm::ScriptedBackend>(llm::load_fixtures(*fixtures_path));
    else
      backend = live_backend(handle.config);
    return drive(handle, *backend, in, fixtures_path.has_value(), opts);
  } catch (const Error& e) {
    return report_error(e, opts);
  }
}

int cmd_inspect(const fs::path& run_dir, const CommandOptions& opts) {
  try {
    const RunStore store(run_dir);
    if (!store.is_run_directory()) throw Error(ErrorCode::NotARunDirectory, run_dir.string());
    const auto config_doc = store.load_config_document();
    const auto query = store.load_query();
    const int n_test = query.n_test ? *query.n_test : config_doc.value("n_test", 3);
    auto state = derive_state(store, n_test);

    json record = nullptr;
    if (fs::exists(store.run_record_path())) record = read_json(store.run_record_path());
    if (state.stage != Stage::Done && record.is_object() && record.contains("status") &&
        record["status"].value("stage", "") == "Failed")
      state = record["status"].get<RunState>();

    json rounds = json::array();
    std::vector<int> complete;
    for (int k : store.round_indices()) {
      const bool ok = store.round_complete(k);
      if (ok) complete.push_back(k);
      rounds.push_back({{"index", k}, {"complete", ok}, {"files", census(store.round_dir(k))}});
    }
    json continuity = json::array();
    for (std::size_t i = 1; i < complete.size(); ++i) {
      if (complete[i] != complete[i - 1] + 1) continue;
      const auto r = pipeline::check_continuity(read_json(store.round_dir(complete[i - 1]) / "results.json"),
                                                read_json(store.round_dir(complete[i]) / "results.json"));
      continuity.push_back({{"from_round", complete[i - 1]}, {"to_round", complete[i]}, {"violations", r.violations}});
    }
    json sections = json::array();
    for (auto kind : report::kSectionOrder)
      if (fs::exists(store.report_dir() / report::section_file_name(kind))) sections.push_back(report::to_string(kind));
    json figures = json::array();
    for (const auto& f : report::list_figures(store.plots_dir())) figures.push_back(f.filename().string());
    std::size_t transcripts = 0;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(store.transcripts_dir(), ec))
      if (entry.path().extension() == ".json") ++transcripts;

    auto& out = *opts.out;
    if (opts.json) {
      json j{{"run_id", store.run_id()}, {"stage", to_string(state.stage)}, {"state", state},
             {"rounds", rounds},         {"continuity", continuity},        {"sections", sections},
             {"figures", figures},       {"transcripts", transcripts}};
      if (record.is_object() && record.contains("failure")) j["failure"] = record["failure"];
      out << j.dump(2) << "\n";
      return kExitDone;
    }
    out << "run: " << store.root().string() << "\n"
        << "stage: " << state.label() << "\n"
        << "rounds: " << rounds.size() << "\n";
    for (const auto& r : rounds) {
      out << "  round_" << r["index"].get<int>() << (r["complete"].get<bool>() ? "" : " (incomplete)") << ":";
      for (const auto& f : r["files"]) out << " " << f.get<std::string>();
      out << "\n";
    }
    out << "continuity:";
    if (continuity.empty()) out << " (no round pairs)";
    out << "\n";
    for (const auto& c : continuity) {
      out << "  round_" << c["from_round"].get<int>() << " -> round_" << c["to_round"].get<int>() << ": ";
      if (c["violations"].empty()) out << "ok";
      for (const auto& v : c["violations"]) out << v.get<std::string>() << "; ";
      out << "\n";
    }
    out << "figures: " << figures.size() << "\n";
    for (const auto& f : figures) out << "  " << f.get<std::string>() << "\n";
    out << "sections: " << sections.size() << "\n";
    for (const auto& s : sections) out << "  " << s.get<std::string>() << "\n";
    out << "transcripts: " << transcripts << "\n";
    if (record.is_object() && record.contains("failure"))
      out << "failure: " << record["failure"].value("reason", "") << "\n";
    return kExitDone;
  } catch (const Error& e) {
    return report_error(e, opts);
  }
}

}  // namespace hypoflow::cli
